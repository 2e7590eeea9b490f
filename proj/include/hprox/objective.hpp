#pragma once

// Finite max-of-smooth objectives f(p) = max_{tau in T} phi(p, tau) and
// their generalized (Clarke-type) first-order objects.

#include "hprox/manifold.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace hprox {

/// Finite, strictly increasing parameter grid standing in for the compact set T.
class ParamSet {
public:
  explicit ParamSet(std::vector<double> values);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

private:
  std::vector<double> values_;
};

/// Open box {lower < x < upper}, coordinate-wise; the open convex set Omega.
struct Domain {
  std::vector<double> lower;
  std::vector<double> upper;

  /// Whole manifold: (-inf, inf) for Euclidean, (0, inf) for LogPositive.
  static Domain whole(const Manifold& m);
  bool contains(const Point& p) const;
};

/// Either one bound for every tau, or one per entry of the ParamSet.
struct LipschitzBound {
  std::vector<double> per_param;
  double sup() const;
};

using PhiFn = std::function<double(const Point&, double tau)>;
using GradPhiFn = std::function<Tangent(const Point&, double tau)>;

struct MaxObjective {
  Manifold manifold;
  ParamSet params;
  PhiFn phi;
  /// Riemannian gradient of phi(., tau).
  GradPhiFn grad_phi;
  Domain domain;
  std::optional<LipschitzBound> lipschitz_bound;
  /// Every phi(., tau) is geodesically convex on the domain.
  bool convex_pieces = false;
  std::string name;

  void require_in_domain(const Point& p) const;
};

struct Evaluation {
  double value = 0.0;
  std::vector<double> argmax_params;
};

/// Generators whose convex hull approximates the generalized subdifferential.
struct SubdiffHull {
  Point base;
  std::vector<Tangent> generators;
  std::vector<double> params;
};

struct MinNormResult {
  Tangent g;
  double norm = 0.0;
  std::vector<double> weights;
};

/// Active-set tolerance used when none is supplied: 1e-12 max(1, |f|).
double default_eta(double f_value);

Evaluation eval_f(const MaxObjective& obj, const Point& p);
/// All tau with phi(p, tau) >= f(p) - eta.
std::vector<double> active_set(const MaxObjective& obj, const Point& p, double eta);
SubdiffHull clarke_subdiff(const MaxObjective& obj, const Point& p, double eta);
/// Same as above with eta = default_eta(f(p)).
SubdiffHull clarke_subdiff(const MaxObjective& obj, const Point& p);

/// f°(p, v) = max over active gradients g of <g, v>_p.
double gen_dir_derivative(const MaxObjective& obj, const Point& p, const Tangent& v, double eta);
double gen_dir_derivative(const MaxObjective& obj, const Point& p, const Tangent& v);

struct SamplingEstimate {
  double value = -std::numeric_limits<double>::infinity();
  /// Max quotient per (radius, step) level.
  std::vector<double> per_level;
  int discarded = 0;
};

/// Sampling estimate of the limsup defining f°(p, v): for each level k the
/// max of [f(exp_q t (D exp_p)_{log_p q} v) - f(q)] / t over random q with
/// d(p, q) <= radius_k and t = step_k, then the inf over levels. Samples
/// leaving the domain are discarded and counted. Verification only.
SamplingEstimate gd_sampling_estimate(const MaxObjective& obj, const Point& p, const Tangent& v,
                                      const std::vector<double>& radius_seq,
                                      const std::vector<double>& step_seq,
                                      int samples_per_level = 64, std::uint64_t seed = 42);

/// Min-norm element of the hull, measured in the metric at hull.base.
MinNormResult min_norm_subgradient(const SubdiffHull& hull);

inline constexpr double kLipschitzSafetyFactor = 1.1;

/// safety * max over tau and sample pairs of
/// ||grad phi(q) - P_{pq} grad phi(p)||_q / d(p, q). Returns the declared
/// bound instead when the objective carries one.
double estimate_sup_lipschitz(const MaxObjective& obj, const std::vector<Point>& region_samples,
                              double safety = kLipschitzSafetyFactor);

/// The max objective with pieces phi(., tau) + (lambda/2) d^2(., anchor).
MaxObjective with_prox_term(const MaxObjective& obj, const Point& anchor, double lambda);

} // namespace hprox
