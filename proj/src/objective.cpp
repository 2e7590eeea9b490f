#include "hprox/objective.hpp"

#include "hprox/errors.hpp"
#include "hprox/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace hprox {

ParamSet::ParamSet(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ContractError("ParamSet must not be empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw ContractError("ParamSet values must be finite");
    if (i > 0 && !(values_[i - 1] < values_[i]))
      throw ContractError("ParamSet values must be strictly increasing");
  }
}

Domain Domain::whole(const Manifold& m) {
  const double inf = std::numeric_limits<double>::infinity();
  const double lo = m.geometry() == Geometry::LogPositive ? 0.0 : -inf;
  return Domain{std::vector<double>(m.dim(), lo), std::vector<double>(m.dim(), inf)};
}

bool Domain::contains(const Point& p) const {
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (i < lower.size() && !(p[i] > lower[i])) return false;
    if (i < upper.size() && !(p[i] < upper[i])) return false;
  }
  return true;
}

double LipschitzBound::sup() const {
  if (per_param.empty()) throw ContractError("empty Lipschitz bound");
  double s = 0.0;
  for (double l : per_param) {
    if (!std::isfinite(l) || l < 0.0) throw ContractError("Lipschitz bound must be finite, >= 0");
    s = std::max(s, l);
  }
  return s;
}

void MaxObjective::require_in_domain(const Point& p) const {
  if (p.manifold() != manifold) throw ContractError("point is on a different manifold");
  if (!domain.contains(p)) {
    std::ostringstream os;
    os << "point " << p << " outside the domain of " << (name.empty() ? "objective" : name);
    throw DomainError(os.str());
  }
}

double default_eta(double f_value) { return 1e-12 * std::max(1.0, std::abs(f_value)); }

namespace {

std::vector<double> piece_values(const MaxObjective& obj, const Point& p) {
  obj.require_in_domain(p);
  std::vector<double> vals;
  vals.reserve(obj.params.size());
  for (double tau : obj.params.values()) vals.push_back(obj.phi(p, tau));
  return vals;
}

} // namespace

Evaluation eval_f(const MaxObjective& obj, const Point& p) {
  const std::vector<double> vals = piece_values(obj, p);
  Evaluation ev;
  ev.value = *std::max_element(vals.begin(), vals.end());
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (vals[i] == ev.value) ev.argmax_params.push_back(obj.params[i]);
  return ev;
}

std::vector<double> active_set(const MaxObjective& obj, const Point& p, double eta) {
  if (!(eta >= 0.0)) throw ContractError("active_set: eta must be >= 0");
  const std::vector<double> vals = piece_values(obj, p);
  const double f = *std::max_element(vals.begin(), vals.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (vals[i] >= f - eta) out.push_back(obj.params[i]);
  return out;
}

SubdiffHull clarke_subdiff(const MaxObjective& obj, const Point& p, double eta) {
  SubdiffHull hull{p, {}, active_set(obj, p, eta)};
  hull.generators.reserve(hull.params.size());
  for (double tau : hull.params) {
    Tangent g = obj.grad_phi(p, tau);
    if (g.base() != p) throw ContractError("grad_phi returned a tangent at the wrong base");
    hull.generators.push_back(std::move(g));
  }
  return hull;
}

SubdiffHull clarke_subdiff(const MaxObjective& obj, const Point& p) {
  return clarke_subdiff(obj, p, default_eta(eval_f(obj, p).value));
}

double gen_dir_derivative(const MaxObjective& obj, const Point& p, const Tangent& v, double eta) {
  if (v.base() != p) throw ContractError("gen_dir_derivative: direction based elsewhere");
  const SubdiffHull hull = clarke_subdiff(obj, p, eta);
  double best = -std::numeric_limits<double>::infinity();
  for (const Tangent& g : hull.generators) best = std::max(best, inner(p, g, v));
  return best;
}

double gen_dir_derivative(const MaxObjective& obj, const Point& p, const Tangent& v) {
  return gen_dir_derivative(obj, p, v, default_eta(eval_f(obj, p).value));
}

namespace {

// Uniform direction in an orthonormal frame at p, scaled to Riemannian norm `len`.
Tangent random_tangent(const Point& p, double len, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> c(p.dim());
  double n2 = 0.0;
  for (double& x : c) {
    x = normal(rng);
    n2 += x * x;
  }
  const double s = n2 > 0.0 ? len / std::sqrt(n2) : 0.0;
  const bool logpos = p.manifold().geometry() == Geometry::LogPositive;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= s * (logpos ? p[i] : 1.0);
  return Tangent(p, std::move(c));
}

} // namespace

SamplingEstimate gd_sampling_estimate(const MaxObjective& obj, const Point& p, const Tangent& v,
                                      const std::vector<double>& radius_seq,
                                      const std::vector<double>& step_seq, int samples_per_level,
                                      std::uint64_t seed) {
  if (v.base() != p) throw ContractError("gd_sampling_estimate: direction based elsewhere");
  if (radius_seq.empty() || radius_seq.size() != step_seq.size())
    throw ContractError("gd_sampling_estimate: radius and step sequences must pair up");
  for (std::size_t k = 0; k < radius_seq.size(); ++k) {
    if (!(radius_seq[k] > 0.0) || !(step_seq[k] > 0.0))
      throw ContractError("gd_sampling_estimate: sequences must be positive");
    if (k > 0 && (radius_seq[k] > radius_seq[k - 1] || step_seq[k] > step_seq[k - 1]))
      throw ContractError("gd_sampling_estimate: sequences must be decreasing");
  }
  obj.require_in_domain(p);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SamplingEstimate est;
  for (std::size_t k = 0; k < radius_seq.size(); ++k) {
    double level_max = -std::numeric_limits<double>::infinity();
    const double t = step_seq[k];
    for (int s = 0; s <= samples_per_level; ++s) {
      try {
        // s == 0 samples q = p itself.
        const Tangent w = s == 0 ? Tangent::zero(p)
                                 : random_tangent(p, radius_seq[k] * unif(rng), rng);
        const Point q = exp_map(p, w);
        const Tangent dir = differential_exp(p, w, v);
        const Point moved = exp_map(q, t * dir);
        const double quotient = (eval_f(obj, moved).value - eval_f(obj, q).value) / t;
        level_max = std::max(level_max, quotient);
      } catch (const DomainError&) {
        ++est.discarded;
      } catch (const RangeError&) {
        ++est.discarded;
      }
    }
    est.per_level.push_back(level_max);
    est.value = k == 0 ? level_max : std::min(est.value, level_max);
  }
  return est;
}

MinNormResult min_norm_subgradient(const SubdiffHull& hull) {
  const std::size_t n = hull.generators.size();
  if (n == 0) throw ContractError("min_norm_subgradient: empty hull");
  const Point& p = hull.base;
  std::vector<double> gram(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      gram[i * n + j] = gram[j * n + i] = inner(p, hull.generators[i], hull.generators[j]);

  const SimplexSolution sol = min_norm_weights(gram, n);
  Tangent g = Tangent::zero(p);
  for (std::size_t i = 0; i < n; ++i)
    if (sol.weights[i] != 0.0) g += sol.weights[i] * hull.generators[i];
  const double len = norm(p, g);
  return MinNormResult{std::move(g), len, sol.weights};
}

double estimate_sup_lipschitz(const MaxObjective& obj, const std::vector<Point>& region_samples,
                              double safety) {
  if (obj.lipschitz_bound) return obj.lipschitz_bound->sup();
  if (region_samples.size() < 2)
    throw ContractError("estimate_sup_lipschitz needs at least 2 samples");
  for (const Point& p : region_samples) obj.require_in_domain(p);

  double best = 0.0;
  for (double tau : obj.params.values()) {
    std::vector<Tangent> grads;
    grads.reserve(region_samples.size());
    for (const Point& p : region_samples) grads.push_back(obj.grad_phi(p, tau));
    for (std::size_t i = 0; i < region_samples.size(); ++i) {
      for (std::size_t j = i + 1; j < region_samples.size(); ++j) {
        const Point& p = region_samples[i];
        const Point& q = region_samples[j];
        const double d = dist(p, q);
        if (!(d > 0.0)) continue;
        const Tangent diff = grads[j] - transport(p, q, grads[i]);
        best = std::max(best, norm(q, diff) / d);
      }
    }
  }
  return safety * best;
}

MaxObjective with_prox_term(const MaxObjective& obj, const Point& anchor, double lambda) {
  if (anchor.manifold() != obj.manifold) throw ContractError("prox anchor on another manifold");
  MaxObjective h = obj;
  h.phi = [phi = obj.phi, anchor, lambda](const Point& p, double tau) {
    const double d = dist(p, anchor);
    return phi(p, tau) + 0.5 * lambda * d * d;
  };
  h.grad_phi = [grad = obj.grad_phi, anchor, lambda](const Point& p, double tau) {
    return grad(p, tau) + lambda * grad_half_sq_dist(p, anchor);
  };
  if (obj.lipschitz_bound) {
    LipschitzBound lb = *obj.lipschitz_bound;
    for (double& l : lb.per_param) l += std::abs(lambda);
    h.lipschitz_bound = lb;
  }
  h.convex_pieces = obj.convex_pieces && lambda >= 0.0;
  h.name = obj.name + " + prox";
  return h;
}

} // namespace hprox
