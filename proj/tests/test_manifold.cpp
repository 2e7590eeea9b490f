#include "hprox/errors.hpp"
#include "hprox/manifold.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hprox;
using hprox::test::eu;
using hprox::test::lp;

TEST_CASE("inner and norm closed forms") {
  const Point one = lp({1.0});
  CHECK(inner(one, Tangent(one, {1.0}), Tangent(one, {1.0})) == doctest::Approx(1.0));
  const Point two = lp({2.0});
  CHECK(inner(two, Tangent(two, {2.0}), Tangent(two, {2.0})) == doctest::Approx(1.0));
  const Point o = eu({0.0, 0.0});
  CHECK(inner(o, Tangent(o, {3, 4}), Tangent(o, {3, 4})) == 25.0);
  CHECK(norm(o, Tangent(o, {3, 4})) == 5.0);

  const Point x = lp({0.7});
  CHECK(norm(x, Tangent(x, {-1.4})) == doctest::Approx(2.0));
  CHECK(norm(x, Tangent::zero(x)) == 0.0);
}

TEST_CASE("base mismatch is a contract violation") {
  const Point a = lp({1.0});
  const Point b = lp({2.0});
  CHECK_THROWS_AS(inner(a, Tangent(b, {1.0}), Tangent(a, {1.0})), ContractError);
  CHECK_THROWS_AS(norm(a, Tangent(b, {1.0})), ContractError);
  CHECK_THROWS_AS(dist(a, eu({1.0})), ContractError);
  CHECK_THROWS_AS(Tangent(a, {1.0}) + Tangent(b, {1.0}), ContractError);
}

TEST_CASE("point validity") {
  CHECK_THROWS_AS(lp({0.0}), DomainError);
  CHECK_THROWS_AS(lp({1e-301}), DomainError);
  CHECK_THROWS_AS(lp({-1.0}), DomainError);
  CHECK_THROWS_AS(eu({std::nan("")}), DomainError);
  CHECK_THROWS_AS(Point(Manifold::euclidean(2), {1.0}), ContractError);
  CHECK_THROWS_AS(Manifold::euclidean(0), ContractError);
  CHECK_NOTHROW(lp({2e-300}));
}

TEST_CASE("distance") {
  CHECK(dist(lp({1.0}), lp({std::exp(1.0)})) == doctest::Approx(1.0));
  CHECK(dist(lp({3.0}), lp({3.0})) == 0.0);
  CHECK(dist(eu({0, 0}), eu({3, 4})) == 5.0);
  CHECK(dist(lp({1.0, 1.0}), lp({std::exp(3.0), std::exp(-4.0)})) == doctest::Approx(5.0));
}

TEST_CASE("exp and log maps") {
  const Point one = lp({1.0});
  CHECK(exp_map(one, Tangent(one, {1.0}))[0] == doctest::Approx(std::exp(1.0)));
  CHECK(exp_map(one, Tangent::zero(one)) == one);
  const Point p = eu({1, 1});
  CHECK(exp_map(p, Tangent(p, {2, 3})) == eu({3, 4}));

  CHECK(log_map(one, lp({std::exp(1.0)}))[0] == doctest::Approx(1.0));
  CHECK(log_map(one, one)[0] == 0.0);
  CHECK(log_map(p, eu({3, 4})).coords() == std::vector<double>{2, 3});
}

TEST_CASE("exp overflow guard raises a range error") {
  const Point one = lp({1.0});
  CHECK_THROWS_AS(exp_map(one, Tangent(one, {701.0})), RangeError);
  CHECK_THROWS_AS(exp_map(one, Tangent(one, {-701.0})), RangeError);
  CHECK_NOTHROW(exp_map(one, Tangent(one, {700.0})));
  // e^-700 leaves the validity floor of 1e-300.
  CHECK_THROWS_AS(exp_map(one, Tangent(one, {-700.0})), DomainError);
}

TEST_CASE("transport") {
  // Oracle: push v to the flat chart s = ln x (v -> v/x), translate, push back (w -> w y).
  const double x = 1.0, y = 2.0, v = 3.0;
  const double expected = (v / x) * y;
  const Tangent t = transport(lp({x}), lp({y}), Tangent(lp({x}), {v}));
  CHECK(t[0] == doctest::Approx(expected));
  CHECK(t[0] == doctest::Approx(6.0));
  CHECK(t.base() == lp({y}));

  const Point p = lp({1.5});
  CHECK(transport(p, p, Tangent(p, {0.3})) == Tangent(p, {0.3}));
  const Tangent e = transport(eu({0}), eu({9}), Tangent(eu({0}), {1}));
  CHECK(e[0] == 1.0);
  const Tangent e2 = transport(eu({0, 0}), eu({3, -2}), Tangent(eu({0, 0}), {1, 2}));
  CHECK(e2.coords() == std::vector<double>{1, 2});
}

TEST_CASE("differential of exp") {
  const Point one = lp({1.0});
  const Tangent d0 = differential_exp(one, Tangent(one, {0.0}), Tangent(one, {1.0}));
  CHECK(d0[0] == doctest::Approx(1.0));
  CHECK(d0.base() == one);

  // Finite-difference oracle on exp_map in its tangent argument.
  const double h = 1e-6;
  const double fd = (exp_map(one, Tangent(one, {1.0 + h}))[0] - exp_map(one, Tangent(one, {1.0 - h}))[0]) / (2 * h);
  const Tangent d1 = differential_exp(one, Tangent(one, {1.0}), Tangent(one, {1.0}));
  CHECK(d1[0] == doctest::Approx(fd).epsilon(1e-8));
  CHECK(d1[0] == doctest::Approx(std::exp(1.0)));
  CHECK(d1.base()[0] == doctest::Approx(std::exp(1.0)));

  const Point p = eu({0.5, -1});
  const Tangent de = differential_exp(p, Tangent(p, {4, 4}), Tangent(p, {2, 5}));
  CHECK(de.coords() == std::vector<double>{2, 5});
}

TEST_CASE("gradient of half squared distance") {
  const Point q = lp({0.4, 2.0});
  CHECK(norm(q, grad_half_sq_dist(q, q)) == 0.0);

  // Oracle: central differences of 1/2 d^2(., 1) along x -> x e^{s}, raised with x^2.
  const double e = std::exp(1.0);
  const auto half_sq = [](double x) { return 0.5 * std::log(x) * std::log(x); };
  const double h = 1e-6;
  const double dds = (half_sq(e * std::exp(h)) - half_sq(e * std::exp(-h))) / (2 * h);  // d/ds
  const double oracle = e * dds;  // d/dx = dds / x, grad = x^2 d/dx
  const Tangent g = grad_half_sq_dist(lp({e}), lp({1.0}));
  CHECK(g[0] == doctest::Approx(oracle).epsilon(1e-8));
  CHECK(g[0] == doctest::Approx(e));
  CHECK(grad_half_sq_dist(eu({1, 1}), eu({0, 0})).coords() == std::vector<double>{1, 1});
}

TEST_CASE("geodesic") {
  const Point one = lp({1.0});
  CHECK(geodesic(one, Tangent(one, {1.0}), 0.0) == one);
  CHECK(geodesic(one, Tangent(one, {1.0}), 2.0)[0] == doctest::Approx(std::exp(2.0)));
  const Point p = eu({1, 2});
  CHECK(geodesic(p, Tangent(p, {1, -1}), 3.0) == eu({4, -1}));
}

TEST_CASE("random identities on both manifolds") {
  std::mt19937_64 rng(7);
  for (const Geometry g : {Geometry::Euclidean, Geometry::LogPositive}) {
    for (std::size_t dim = 1; dim <= 4; ++dim) {
      const Manifold m(g, dim);
      for (int trial = 0; trial < 200; ++trial) {
        const Point p = test::random_point(m, rng);
        const Point q = test::random_point(m, rng);
        const Point r = test::random_point(m, rng);
        const Point back = exp_map(p, log_map(p, q));
        for (std::size_t i = 0; i < dim; ++i)
          CHECK(std::abs(back[i] - q[i]) <= 1e-10 * std::max(1.0, std::abs(q[i])));
        CHECK(std::abs(dist(p, q) - norm(p, log_map(p, q))) <= 1e-10 * std::max(1.0, dist(p, q)));
        CHECK(dist(p, r) <= dist(p, q) + dist(q, r) + 1e-12);
        CHECK(dist(p, q) == doctest::Approx(dist(q, p)));

        const Tangent u = test::random_vec(p, rng);
        const Tangent v = test::random_vec(p, rng);
        const double before = inner(p, u, v);
        const double after = inner(q, transport(p, q, u), transport(p, q, v));
        CHECK(std::abs(after - before) <= 1e-10 * std::max(1.0, norm(p, u) * norm(p, v)));
        CHECK(dist(p, exp_map(p, 0.3 * u)) == doctest::Approx(norm(p, 0.3 * u)));
        CHECK(geodesic(p, u, 0.3) == exp_map(p, 0.3 * u));
      }
    }
  }
}

TEST_CASE("half squared distance is 1-strongly convex along geodesics") {
  std::mt19937_64 rng(11);
  const Manifold m = Manifold::log_positive(2);
  double worst = -1.0;
  for (int trial = 0; trial < 300; ++trial) {
    const Point a = test::random_point(m, rng);
    const Point b = test::random_point(m, rng);
    const Point pbar = test::random_point(m, rng);
    const auto h = [&](const Point& x) {
      const double d = dist(x, pbar);
      return 0.5 * d * d;
    };
    const Tangent v = log_map(a, b);
    const double d2 = dist(a, b) * dist(a, b);
    for (double t = 0.1; t < 0.95; t += 0.1) {
      const double lhs = h(geodesic(a, v, t));
      const double rhs = (1 - t) * h(a) + t * h(b) - 0.5 * t * (1 - t) * d2;
      worst = std::max(worst, lhs - rhs);
    }
  }
  CHECK(worst <= 1e-8);
}
