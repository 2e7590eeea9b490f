#include "hprox/problems.hpp"

#include "hprox/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hprox::problems {

double example_f1(double x) { return std::log(x); }
double example_f2(double x) { return -std::log(x) + std::exp(-2.0 * x) - std::exp(-2.0); }
double example_f(double x) { return std::max(example_f1(x), example_f2(x)); }

namespace {

// Euclidean derivatives of the example pieces.
double d_f1(double x) { return 1.0 / x; }
double d_f2(double x) { return -1.0 / x - 2.0 * std::exp(-2.0 * x); }

double example_phi(double x, double tau) {
  const double a = example_f1(x);
  return a + tau * (example_f2(x) - a);
}

// grad h = x^2 h'(x) for the metric x^{-2}.
double example_grad(double x, double tau) {
  const double a = d_f1(x);
  return x * x * (a + tau * (d_f2(x) - a));
}

std::vector<Point> log_grid(const Manifold& m, double lo, double hi, std::size_t n) {
  std::vector<Point> out;
  out.reserve(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::exp(a + (b - a) * (i + 1.0) / (n + 1.0));
    out.emplace_back(m, std::vector<double>(m.dim(), x));
  }
  return out;
}

std::vector<Point> linear_grid(const Manifold& m, double lo, double hi, std::size_t n) {
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * (i + 1.0) / (n + 1.0);
    out.emplace_back(m, std::vector<double>(m.dim(), x));
  }
  return out;
}

constexpr double kExampleRegionUpper = 4.0;

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.25))
    throw ConfigError("paper_example epsilon must satisfy 0 < epsilon < 1/4");
}

} // namespace

Problem paper_example(double epsilon) {
  check_epsilon(epsilon);
  const Manifold m = Manifold::log_positive(1);
  MaxObjective obj{m,
                   ParamSet({0.0, 1.0}),
                   [](const Point& p, double tau) { return example_phi(p[0], tau); },
                   [](const Point& p, double tau) {
                     return Tangent(p, {example_grad(p[0], tau)});
                   },
                   Domain{{epsilon}, {std::numeric_limits<double>::infinity()}},
                   std::nullopt,
                   false,
                   "paper_example"};
  Problem prob{std::move(obj),
               oracle::Region{{epsilon}, {kExampleRegionUpper}},
               log_grid(m, epsilon, kExampleRegionUpper, 512),
               Point(m, {5.0 / 16.0}),
               {Point(m, {1.0})},
               {}};
  prob.metadata = {{"epsilon", epsilon},
                   {"q", 5.0 / 16.0},
                   {"c", example_f(0.75)},
                   {"delta", 0.4},
                   {"x_star", 1.0}};
  return prob;
}

Problem paper_example_product(std::size_t n, double epsilon) {
  check_epsilon(epsilon);
  if (n < 1 || n > 8) throw ConfigError("paper_example_product needs 1 <= n <= 8");
  const Manifold m = Manifold::log_positive(n);
  std::vector<double> taus(std::size_t{1} << n);
  for (std::size_t i = 0; i < taus.size(); ++i) taus[i] = static_cast<double>(i);

  auto bit = [](double tau, std::size_t i) {
    return static_cast<double>((static_cast<unsigned>(tau) >> i) & 1u);
  };
  MaxObjective obj{m,
                   ParamSet(std::move(taus)),
                   [bit](const Point& p, double tau) {
                     double acc = 0.0;
                     for (std::size_t i = 0; i < p.dim(); ++i) acc += example_phi(p[i], bit(tau, i));
                     return acc;
                   },
                   [bit](const Point& p, double tau) {
                     std::vector<double> g(p.dim());
                     for (std::size_t i = 0; i < p.dim(); ++i) g[i] = example_grad(p[i], bit(tau, i));
                     return Tangent(p, std::move(g));
                   },
                   Domain{std::vector<double>(n, epsilon),
                          std::vector<double>(n, std::numeric_limits<double>::infinity())},
                   std::nullopt,
                   false,
                   "paper_example_product"};
  const oracle::Region region{std::vector<double>(n, epsilon),
                              std::vector<double>(n, kExampleRegionUpper)};
  std::vector<Point> samples = log_grid(m, epsilon, kExampleRegionUpper, 256);
  for (Point& p : oracle::sample_points(m, region, 32, 7)) samples.push_back(std::move(p));
  Problem prob{std::move(obj), region, std::move(samples),
               Point(m, std::vector<double>(n, 5.0 / 16.0)),
               {Point(m, std::vector<double>(n, 1.0))}, {}};
  prob.metadata = {{"epsilon", epsilon}, {"n", static_cast<double>(n)}, {"x_star", 1.0}};
  return prob;
}

Problem abs_problem() {
  const Manifold m = Manifold::euclidean(1);
  MaxObjective obj{m,
                   ParamSet({-1.0, 1.0}),
                   [](const Point& p, double tau) { return tau * p[0]; },
                   [](const Point& p, double tau) { return Tangent(p, {tau}); },
                   Domain::whole(m),
                   std::nullopt,
                   true,
                   "abs"};
  return Problem{std::move(obj),  oracle::Region{{-10.0}, {10.0}},
                 linear_grid(m, -10.0, 10.0, 256), Point(m, {5.0}),
                 {Point(m, {0.0})}, {{"x_star", 0.0}}};
}

Problem quadratic_problem() {
  const Manifold m = Manifold::euclidean(1);
  MaxObjective obj{m,
                   ParamSet({0.0}),
                   [](const Point& p, double) { return 0.5 * p[0] * p[0]; },
                   [](const Point& p, double) { return Tangent(p, {p[0]}); },
                   Domain::whole(m),
                   std::nullopt,
                   true,
                   "quadratic"};
  return Problem{std::move(obj),  oracle::Region{{-10.0}, {10.0}},
                 linear_grid(m, -10.0, 10.0, 256), Point(m, {1.0}),
                 {Point(m, {0.0})}, {{"x_star", 0.0}}};
}

Problem inline_problem(const InlineSpec& spec) {
  const Manifold m(spec.geometry, spec.dim);
  if (spec.pieces.empty()) throw ConfigError("inline problem needs at least one piece");
  std::vector<InlinePiece> pieces = spec.pieces;
  std::sort(pieces.begin(), pieces.end(),
            [](const InlinePiece& a, const InlinePiece& b) { return a.tau < b.tau; });
  std::vector<double> taus;
  LipschitzBound lip;
  bool convex = true;
  for (InlinePiece& piece : pieces) {
    if (piece.linear.empty()) piece.linear.assign(spec.dim, 0.0);
    if (piece.linear.size() != spec.dim)
      throw ConfigError("inline piece 'linear' must have length dim");
    if (!std::isfinite(piece.curvature) || !std::isfinite(piece.offset))
      throw ConfigError("inline piece coefficients must be finite");
    taus.push_back(piece.tau);
    lip.per_param.push_back(std::abs(piece.curvature));
    convex = convex && piece.curvature >= 0.0;
  }
  ParamSet params(taus);  // rejects duplicate tau

  const bool logpos = spec.geometry == Geometry::LogPositive;
  auto find = [pieces](double tau) -> const InlinePiece& {
    const auto it = std::lower_bound(
        pieces.begin(), pieces.end(), tau,
        [](const InlinePiece& piece, double t) { return piece.tau < t; });
    if (it == pieces.end() || it->tau != tau) throw ContractError("unknown inline tau");
    return *it;
  };
  PhiFn phi = [find, logpos](const Point& p, double tau) {
    const InlinePiece& piece = find(tau);
    double sq = 0.0;
    double lin = 0.0;
    for (std::size_t i = 0; i < p.dim(); ++i) {
      const double c = logpos ? std::log(p[i]) : p[i];
      sq += c * c;
      lin += piece.linear[i] * c;
    }
    return 0.5 * piece.curvature * sq + lin + piece.offset;
  };
  GradPhiFn grad = [find, logpos](const Point& p, double tau) {
    const InlinePiece& piece = find(tau);
    std::vector<double> g(p.dim());
    for (std::size_t i = 0; i < p.dim(); ++i) {
      const double c = logpos ? std::log(p[i]) : p[i];
      const double chart = piece.curvature * c + piece.linear[i];
      g[i] = logpos ? p[i] * chart : chart;
    }
    return Tangent(p, std::move(g));
  };

  Domain domain = Domain::whole(m);
  if (spec.domain_lower) domain.lower = *spec.domain_lower;
  if (spec.domain_upper) domain.upper = *spec.domain_upper;
  if (domain.lower.size() != spec.dim || domain.upper.size() != spec.dim)
    throw ConfigError("inline domain bounds must have length dim");
  if (spec.region.lower.size() != spec.dim || spec.region.upper.size() != spec.dim)
    throw ConfigError("inline region bounds must have length dim");
  for (std::size_t i = 0; i < spec.dim; ++i) {
    if (!(spec.region.lower[i] < spec.region.upper[i]))
      throw ConfigError("inline region lower must be below upper");
    if (logpos && !(spec.region.lower[i] > 0.0))
      throw ConfigError("inline region must be positive on LogPositive");
  }

  MaxObjective obj{m, std::move(params), std::move(phi), std::move(grad), domain, lip, convex,
                   "inline"};
  std::vector<double> centre(spec.dim);
  for (std::size_t i = 0; i < spec.dim; ++i)
    centre[i] = logpos ? std::sqrt(spec.region.lower[i] * spec.region.upper[i])
                       : 0.5 * (spec.region.lower[i] + spec.region.upper[i]);
  Point start(m, spec.start ? *spec.start : centre);
  std::vector<Point> samples = oracle::sample_points(m, spec.region, 64, 11);
  return Problem{std::move(obj), spec.region, std::move(samples), start, {}, {}};
}

std::vector<std::string> builtin_names() {
  return {"paper_example", "paper_example_product", "abs", "quadratic"};
}

} // namespace hprox::problems
