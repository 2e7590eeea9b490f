#include "hprox/oracle.hpp"

#include "hprox/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hprox::oracle {

double default_fd_step(const Point& p, std::size_t i) {
  return std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(p[i]));
}

Tangent fd_gradient(const ScalarField& field, const Point& p, double step) {
  std::vector<double> out(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double h = step > 0.0 ? step : default_fd_step(p, i);
    const Tangent e = Tangent::basis(p, i);
    const double fp = field(exp_map(p, h * e));
    const double fm = field(exp_map(p, -h * e));
    const double df = (fp - fm) / (2.0 * h);
    // Both shipped metrics are diagonal in coordinates.
    out[i] = df / inner(p, e, e);
  }
  return Tangent(p, std::move(out));
}

void GridSpec::validate(std::size_t dim) const {
  if (lower.size() != dim || upper.size() != dim)
    throw ContractError("grid bounds do not match the manifold dimension");
  if (points_per_dim < 2) throw ContractError("grid needs at least 2 points per dimension");
  for (std::size_t i = 0; i < dim; ++i)
    if (!(lower[i] < upper[i])) throw ContractError("grid lower must be below upper");
  if (std::pow(static_cast<double>(points_per_dim), static_cast<double>(dim)) > kMaxNodes)
    throw ContractError("grid exceeds the 1e7 node guard");
}

namespace {

std::optional<double> try_eval(const ScalarField& field, const Manifold& m,
                               std::vector<double> coords) {
  try {
    return field(Point(m, std::move(coords)));
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

} // namespace

GridResult grid_minimize(const ScalarField& field, const Manifold& manifold,
                         const GridSpec& grid) {
  const std::size_t dim = manifold.dim();
  grid.validate(dim);
  const auto n = static_cast<std::size_t>(grid.points_per_dim);
  std::vector<double> h(dim);
  for (std::size_t i = 0; i < dim; ++i) h[i] = (grid.upper[i] - grid.lower[i]) / (n + 1);
  auto node = [&](std::size_t axis, std::size_t idx) {
    return grid.lower[axis] + static_cast<double>(idx + 1) * h[axis];
  };

  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= n;

  std::optional<std::vector<double>> best_coords;
  double best = std::numeric_limits<double>::infinity();
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::vector<double> coords(dim);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t axis = 0; axis < dim; ++axis) {
      coords[axis] = node(axis, rem % n);
      rem /= n;
    }
    const auto v = try_eval(field, manifold, coords);
    if (!v) {
      ++skipped;
      continue;
    }
    ++evaluated;
    // Ties go to the lexicographically smallest node so the result does not
    // depend on traversal order.
    if (*v < best || (*v == best && best_coords && coords < *best_coords)) {
      best = *v;
      best_coords = coords;
    }
  }
  if (!best_coords) throw DomainError("grid_minimize: field undefined on every node");

  if (dim == 1) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::max(grid.lower[0], (*best_coords)[0] - h[0]);
    double b = std::min(grid.upper[0], (*best_coords)[0] + h[0]);
    auto eval = [&](double x) {
      const auto v = try_eval(field, manifold, {x});
      return v ? *v : std::numeric_limits<double>::infinity();
    };
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    while (b - a > 1e-10) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = eval(d);
      }
    }
    for (auto [x, fx] : {std::pair{c, fc}, std::pair{d, fd}}) {
      if (fx < best) {
        best = fx;
        best_coords = std::vector<double>{x};
      }
    }
  }
  return GridResult{Point(manifold, *best_coords), best, evaluated, skipped};
}

Point sample_point(const Manifold& manifold, const Region& region, std::mt19937_64& rng) {
  if (region.lower.size() != manifold.dim() || region.upper.size() != manifold.dim())
    throw ContractError("sampling region does not match the manifold dimension");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> c(manifold.dim());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double u = unif(rng);
    if (manifold.geometry() == Geometry::LogPositive) {
      const double lo = std::log(region.lower[i]);
      const double hi = std::log(region.upper[i]);
      c[i] = std::exp(lo + u * (hi - lo));
    } else {
      c[i] = region.lower[i] + u * (region.upper[i] - region.lower[i]);
    }
  }
  return Point(manifold, std::move(c));
}

std::vector<Point> sample_points(const Manifold& manifold, const Region& region, std::size_t n,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_point(manifold, region, rng));
  return out;
}

Tangent random_tangent(const Point& p, double len, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> c(p.dim());
  for (double& x : c) x = normal(rng);
  Tangent v(p, std::move(c));
  const double n = norm(p, v);
  return n > 0.0 ? (len / n) * v : Tangent::zero(p);
}

ConvexityReport geodesic_convexity_test(const ScalarField& field, const Manifold& manifold,
                                        const Region& region, int samples, double modulus,
                                        std::uint64_t seed, double slack) {
  if (samples < 1) throw ContractError("convexity test needs at least one sample");
  if (!(modulus >= 0.0)) throw ContractError("convexity modulus must be >= 0");
  std::mt19937_64 rng(seed);
  ConvexityReport rep;
  rep.modulus = modulus;
  constexpr int kRetryCap = 100;
  for (int s = 0; s < samples; ++s) {
    bool done = false;
    for (int attempt = 0; attempt < kRetryCap && !done; ++attempt) {
      try {
        const Point p = sample_point(manifold, region, rng);
        const Point q = sample_point(manifold, region, rng);
        const Tangent v = log_map(p, q);
        const double hp = field(p);
        const double hq = field(q);
        const double d = dist(p, q);
        for (int i = 1; i <= 9; ++i) {
          const double t = 0.1 * i;
          const double ht = field(geodesic(p, v, t));
          const double bound = (1 - t) * hp + t * hq - 0.5 * modulus * t * (1 - t) * d * d;
          const double excess = ht - bound;
          ++rep.checks;
          if (excess > slack) ++rep.violations;
          if (excess > rep.worst_violation) {
            rep.worst_violation = excess;
            rep.worst_p = p;
            rep.worst_q = q;
            rep.worst_t = t;
          }
        }
        done = true;
      } catch (const DomainError&) {
        ++rep.discarded;
      }
    }
  }
  return rep;
}

UscReport usc_sampler(const MaxObjective& obj, const Point& p, const Tangent& v, int n,
                      std::uint64_t seed, double tol) {
  if (n < 2) throw ContractError("usc_sampler needs n >= 2");
  std::mt19937_64 rng(seed);
  UscReport rep;
  rep.n = n;
  rep.reference = gen_dir_derivative(obj, p, v);
  rep.tail_max = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= n; ++k) {
    const double r = 1.0 / k;
    // Draw both perturbations every k so the stream does not depend on exits.
    const Tangent u = random_tangent(p, r, rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> raw(p.dim());
    for (double& x : raw) x = normal(rng);
    try {
      const Point pk = exp_map(p, u);
      obj.require_in_domain(pk);
      Tangent noise(pk, raw);
      const double nn = norm(pk, noise);
      noise = nn > 0.0 ? (r * r / nn) * noise : Tangent::zero(pk);
      const Tangent vk = transport(p, pk, v) + noise;
      const double val = gen_dir_derivative(obj, pk, vk);
      if (k > n / 2) rep.tail_max = std::max(rep.tail_max, val);
    } catch (const DomainError&) {
      ++rep.discarded;
    } catch (const RangeError&) {
      ++rep.discarded;
    }
  }
  rep.difference = rep.tail_max - rep.reference;
  rep.passed = rep.difference <= tol;
  rep.note = "sampled evidence for upper semicontinuity, not a proof";
  return rep;
}

} // namespace hprox::oracle

namespace hprox::oracle {

namespace {

double coord_relative(const Point& a, const Point& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double scale = b.manifold().geometry() == Geometry::LogPositive
                             ? std::abs(b[i])
                             : std::max(1.0, std::abs(b[i]));
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

} // namespace

bool GeometryReport::passed(double identity_tol, double fd_tol) const {
  return roundtrip <= identity_tol && metric <= identity_tol && isometry <= identity_tol &&
         triangle_excess <= identity_tol && grad_half_sq <= fd_tol && dexp <= fd_tol;
}

double relative_error(const Tangent& a, const Tangent& b) {
  const Point& p = b.base();
  const Tangent a_at_b(p, a.coords());
  return norm(p, a_at_b - b) / std::max(1.0, norm(p, b));
}

GeometryReport geometry_suite(const Manifold& manifold, const Region& region, int samples,
                              int fd_points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GeometryReport rep;
  for (int s = 0; s < samples; ++s) {
    const Point p = sample_point(manifold, region, rng);
    const Point q = sample_point(manifold, region, rng);
    const Point r = sample_point(manifold, region, rng);
    const Tangent lpq = log_map(p, q);
    rep.roundtrip = std::max(rep.roundtrip, coord_relative(exp_map(p, lpq), q));
    const double d = dist(p, q);
    rep.metric = std::max(rep.metric, std::abs(d - norm(p, lpq)) / std::max(1.0, d));

    const Tangent u = random_tangent(p, 1.0 + std::abs(std::normal_distribution<double>()(rng)), rng);
    const Tangent v = random_tangent(p, 1.0, rng);
    const double before = inner(p, u, v);
    const double after = inner(q, transport(p, q, u), transport(p, q, v));
    rep.isometry = std::max(rep.isometry, std::abs(after - before) / std::max(1.0, norm(p, u)));

    const double excess = dist(p, r) - dist(p, q) - dist(q, r);
    rep.triangle_excess = std::max(rep.triangle_excess, excess);
    ++rep.samples;
  }
  for (int s = 0; s < fd_points; ++s) {
    const Point q = sample_point(manifold, region, rng);
    const Point pbar = sample_point(manifold, region, rng);
    const Tangent fd = fd_gradient(
        [&](const Point& x) {
          const double d = dist(x, pbar);
          return 0.5 * d * d;
        },
        q);
    rep.grad_half_sq = std::max(rep.grad_half_sq, relative_error(fd, grad_half_sq_dist(q, pbar)));

    // D exp_q at w applied to u, against central differences in w.
    const Tangent w = random_tangent(q, 0.5, rng);
    const Tangent u = random_tangent(q, 1.0, rng);
    const Tangent analytic = differential_exp(q, w, u);
    const double h = 1e-6;
    const Point plus = exp_map(q, w + h * u);
    const Point minus = exp_map(q, w - h * u);
    std::vector<double> c(q.dim());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = (plus[i] - minus[i]) / (2.0 * h);
    rep.dexp = std::max(rep.dexp, relative_error(Tangent(analytic.base(), c), analytic));
    ++rep.fd_points;
  }
  return rep;
}

double check_piece_gradients(const MaxObjective& obj, const std::vector<Point>& points) {
  double worst = 0.0;
  for (double tau : obj.params.values()) {
    for (const Point& p : points) {
      const Tangent fd = fd_gradient([&](const Point& x) { return obj.phi(x, tau); }, p);
      worst = std::max(worst, relative_error(fd, obj.grad_phi(p, tau)));
    }
  }
  return worst;
}

double sum_rule_discrepancy(const MaxObjective& obj, const std::vector<Point>& points,
                            const Point& anchor, double lambda, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const MaxObjective sum = with_prox_term(obj, anchor, lambda);
  double worst = 0.0;
  for (const Point& p : points) {
    const Tangent v = random_tangent(p, 1.0, rng);
    const double lhs = gen_dir_derivative(sum, p, v);
    const double rhs =
        gen_dir_derivative(obj, p, v) + lambda * inner(p, grad_half_sq_dist(p, anchor), v);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

} // namespace hprox::oracle
