#pragma once

// Independent verification machinery: finite differences, dense grids,
// geodesic convexity sampling and upper-semicontinuity sampling. None of it
// is used by the solvers themselves.

#include "hprox/manifold.hpp"
#include "hprox/objective.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hprox::oracle {

using ScalarField = std::function<double(const Point&)>;

/// sqrt(machine epsilon) * max(1, |p_i|).
double default_fd_step(const Point& p, std::size_t i);

/// Central differences of field(exp_p(+-h e_i)) per basis direction, raised
/// to a Riemannian gradient with the (diagonal) metric at p. step <= 0 uses
/// default_fd_step.
Tangent fd_gradient(const ScalarField& field, const Point& p, double step = 0.0);

struct GridSpec {
  std::vector<double> lower;
  std::vector<double> upper;
  int points_per_dim = 2;

  static constexpr double kMaxNodes = 1e7;
  /// Throws ContractError when the grid is malformed or too large.
  void validate(std::size_t dim) const;
};

struct GridResult {
  Point point;
  double value = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

/// Brute-force argmin over the interior nodes lower + (i+1) h,
/// h = (upper - lower) / (points_per_dim + 1). In dim 1 the best node is
/// refined by golden-section search on its neighbouring cells to 1e-10 width.
/// Nodes where the field throws DomainError are skipped.
GridResult grid_minimize(const ScalarField& field, const Manifold& manifold,
                         const GridSpec& grid);

/// Coordinate box used to draw random points (log-uniform for LogPositive).
struct Region {
  std::vector<double> lower;
  std::vector<double> upper;
};

Point sample_point(const Manifold& manifold, const Region& region, std::mt19937_64& rng);
std::vector<Point> sample_points(const Manifold& manifold, const Region& region, std::size_t n,
                                 std::uint64_t seed);

struct ConvexityReport {
  int checks = 0;
  int violations = 0;
  /// Largest h(gamma(t)) - bound(t) seen; negative when every check holds.
  double worst_violation = -std::numeric_limits<double>::infinity();
  std::optional<Point> worst_p;
  std::optional<Point> worst_q;
  double worst_t = 0.0;
  int discarded = 0;
  double modulus = 0.0;

  bool passed() const noexcept { return violations == 0; }
};

/// For random pairs (p, q) in `region` and t in {0.1, ..., 0.9} checks
///   h(gamma(t)) <= (1-t) h(p) + t h(q) - (modulus/2) t (1-t) d^2(p, q) + slack.
ConvexityReport geodesic_convexity_test(const ScalarField& field, const Manifold& manifold,
                                        const Region& region, int samples, double modulus,
                                        std::uint64_t seed = 42, double slack = 1e-8);

struct UscReport {
  double reference = 0.0;
  double tail_max = 0.0;
  double difference = 0.0;
  int n = 0;
  int discarded = 0;
  bool passed = false;
  std::string note;
};

inline constexpr double kUscTolerance = 1e-3;

/// Builds p_k = exp_p(u_k / k) with random unit u_k and
/// v_k = P_{p p_k} v + (random tangent of norm 1/k^2), k = 1..n, and compares
/// the max of f°(p_k, v_k) over k > n/2 with f°(p, v).
UscReport usc_sampler(const MaxObjective& obj, const Point& p, const Tangent& v, int n,
                      std::uint64_t seed = 42, double tol = kUscTolerance);

/// Random tangent at p with Riemannian norm `len`.
Tangent random_tangent(const Point& p, double len, std::mt19937_64& rng);

/// Worst-case errors over random geometry identities on one manifold.
struct GeometryReport {
  int samples = 0;
  double roundtrip = 0.0;       // exp_p(log_p q) vs q, relative per coordinate
  double metric = 0.0;          // |d(p,q) - ||log_p q|||
  double isometry = 0.0;        // |<Pu,Pv>_q - <u,v>_p|, relative
  double triangle_excess = 0.0; // max(0, d(p,r) - d(p,q) - d(q,r))
  int fd_points = 0;
  double grad_half_sq = 0.0;    // grad_half_sq_dist vs fd_gradient, relative
  double dexp = 0.0;            // differential_exp vs finite differences, relative

  bool passed(double identity_tol = 1e-10, double fd_tol = 1e-6) const;
};

GeometryReport geometry_suite(const Manifold& manifold, const Region& region, int samples,
                              int fd_points, std::uint64_t seed = 42);

/// ||a - b|| / max(1, ||b||) in the metric at b's base.
double relative_error(const Tangent& a, const Tangent& b);

/// Max relative error of grad_phi against fd_gradient over points and taus.
double check_piece_gradients(const MaxObjective& obj, const std::vector<Point>& points);

/// Max |(f+g)°(p,v) - f°(p,v) - lambda <grad 1/2 d^2(., anchor)(p), v>| with
/// the sum built as one MaxObjective; random unit v per point.
double sum_rule_discrepancy(const MaxObjective& obj, const std::vector<Point>& points,
                            const Point& anchor, double lambda, std::uint64_t seed = 42);

} // namespace hprox::oracle
