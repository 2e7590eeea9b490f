#include "hprox/prox.hpp"

#include "hprox/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hprox {

LambdaSchedule::LambdaSchedule(std::vector<double> values, double lower, double upper)
    : values_(std::move(values)), lower_(lower), upper_(upper) {
  if (values_.empty()) throw ParameterError("lambda schedule is empty");
  if (!std::isfinite(lower_) || lower_ < 0.0) throw ParameterError("lambda lower bound invalid");
  if (!(upper_ > lower_)) throw ParameterError("lambda_bar must exceed the lower bound");
  for (double l : values_) {
    if (!(l > lower_) || !(l <= upper_)) {
      std::ostringstream os;
      os << "lambda " << l << " violates " << lower_ << " < lambda <= " << upper_;
      throw ParameterError(os.str());
    }
  }
}

LambdaSchedule LambdaSchedule::constant(double lambda, double lower, double upper) {
  return LambdaSchedule({lambda}, lower, upper);
}

LambdaSchedule LambdaSchedule::sequence(std::vector<double> values, double lower, double upper) {
  return LambdaSchedule(std::move(values), lower, upper);
}

double LambdaSchedule::at(std::size_t k) const {
  return values_[std::min(k, values_.size() - 1)];
}

double LambdaSchedule::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

void ProxConfig::validate() const {
  if (!(outer_tol > 0.0)) throw ParameterError("outer_tol must be > 0");
  if (!(inner_tol > 0.0)) throw ParameterError("inner_tol must be > 0");
  if (max_outer < 1) throw ParameterError("max_outer must be >= 1");
  if (max_inner < 1) throw ParameterError("max_inner must be >= 1");
}

std::string to_string(Termination t) {
  switch (t) {
  case Termination::Stationary: return "Stationary";
  case Termination::MaxIters: return "MaxIters";
  case Termination::Error: return "Error";
  }
  return "Unknown";
}

namespace {

struct Probe {
  double value;
  MinNormResult min_norm;
};

Probe probe(const MaxObjective& h, const Point& p) {
  const double v = eval_f(h, p).value;
  return Probe{v, min_norm_subgradient(clarke_subdiff(h, p, default_eta(v)))};
}

bool evaluable(const MaxObjective& h, const Point& p) { return h.domain.contains(p); }

// Unit-speed geodesic through `base` in dim 1; s is signed arc length.
struct Line {
  Point base;
  Tangent unit;

  Point at(double s) const { return geodesic(base, unit, s); }
  Tangent velocity(double s) const { return differential_exp(base, s * unit, unit); }
};

std::optional<Point> try_point(const Line& line, double s) {
  try {
    return line.at(s);
  } catch (const DomainError&) {
  } catch (const RangeError&) {
  }
  return std::nullopt;
}

// Bisection on the sign of the right derivative of h along the line. For a
// strongly convex h it is nondecreasing and changes sign at the minimizer.
std::optional<Point> bisection_polish(const MaxObjective& h, const Point& from, double mu,
                                      int& iters) {
  const Tangent e = Tangent::basis(from, 0);
  const Line line{from, (1.0 / norm(from, e)) * e};
  const Probe p0 = probe(h, from);
  if (p0.min_norm.norm == 0.0) return from;

  auto sigma = [&](double s) {
    const Point q = line.at(s);
    return gen_dir_derivative(h, q, line.velocity(s), 0.0);
  };
  auto usable = [&](double s) {
    const auto q = try_point(line, s);
    return q && evaluable(h, *q);
  };

  // d(from, argmin) <= ||g|| / mu for a mu-strongly convex h.
  const double radius = p0.min_norm.norm / mu * (1.0 + 1e-9) + 1e-300;
  double lo = 0.0;
  double hi = 0.0;
  if (sigma(0.0) >= 0.0) {
    lo = -radius;
    while (!usable(lo) && lo < -1e-300) lo *= 0.5;
    if (!usable(lo) || sigma(lo) >= 0.0) return std::nullopt;
  } else {
    hi = radius;
    while (!usable(hi) && hi > 1e-300) hi *= 0.5;
    if (!usable(hi) || sigma(hi) < 0.0) return std::nullopt;
  }

  for (int it = 0; it < 400; ++it) {
    const double width = hi - lo;
    if (width <= 1e-16 * std::max({1.0, std::abs(lo), std::abs(hi)})) break;
    const double mid = lo + 0.5 * width;
    if (mid <= lo || mid >= hi) break;
    ++iters;
    if (sigma(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const Point a = line.at(lo);
  const Point b = line.at(hi);
  return eval_f(h, a).value < eval_f(h, b).value ? a : b;
}

// Prox-linear model steps for dim > 1: linearize every piece at p, add
// (c/2)||v||^2, and minimize the model through its simplex dual. c starts at
// lambda and doubles until the model majorizes h at the trial point.
Point prox_linear_polish(const MaxObjective& h, const Point& from, double lambda, double tol,
                         int budget, int& iters) {
  Point p = from;
  Probe pr = probe(h, p);
  Point best = p;
  double best_norm = pr.min_norm.norm;
  double curvature = lambda;
  const std::size_t n = h.params.size();
  for (int it = 0; it < budget; ++it) {
    if (pr.min_norm.norm <= tol) break;
    // Below this, value differences are rounding noise; small-gradient
    // progress is then judged by the subgradient norm instead.
    const double slack = 1e-14 * std::max(1.0, std::abs(pr.value));

    std::vector<double> vals(n);
    std::vector<Tangent> grads;
    grads.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      vals[i] = h.phi(p, h.params[i]);
      grads.push_back(h.grad_phi(p, h.params[i]));
    }
    std::vector<double> gram(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        gram[i * n + j] = gram[j * n + i] = inner(p, grads[i], grads[j]);

    bool accepted = false;
    Point next = p;
    std::optional<Probe> next_probe;
    for (int bt = 0; bt < 60 && !accepted; ++bt) {
      std::vector<double> q(gram);
      for (double& x : q) x /= curvature;
      std::vector<double> c(n);
      for (std::size_t i = 0; i < n; ++i) c[i] = -(vals[i] - pr.value);
      const SimplexSolution dual = simplex_qp(q, c, n, 1e-18, 5000);
      Tangent v = Tangent::zero(p);
      for (std::size_t i = 0; i < n; ++i)
        if (dual.weights[i] != 0.0) v += (-dual.weights[i] / curvature) * grads[i];
      double model = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) model = std::max(model, vals[i] + inner(p, grads[i], v));
      const double vn = norm(p, v);
      model += 0.5 * curvature * vn * vn;
      try {
        Point trial = exp_map(p, v);
        if (evaluable(h, trial)) {
          const Probe tp = probe(h, trial);
          const bool majorized = tp.value <= model + 1e-15 * std::max(1.0, std::abs(model));
          const bool flatter = tp.value <= pr.value + slack && tp.min_norm.norm < pr.min_norm.norm;
          if ((majorized && tp.value <= pr.value + slack) || flatter) {
            accepted = true;
            next = std::move(trial);
            next_probe = tp;
            break;
          }
        }
      } catch (const DomainError&) {
      } catch (const RangeError&) {
      }
      curvature *= 2.0;
    }
    ++iters;
    if (!accepted || next == p) break;
    p = std::move(next);
    pr = *next_probe;
    if (pr.min_norm.norm < best_norm) {
      best = p;
      best_norm = pr.min_norm.norm;
    }
    curvature = std::max(lambda, 0.5 * curvature);
  }
  return best;
}

} // namespace

InnerResult inner_solve(const MaxObjective& h, const Point& start, double mu, double lambda,
                        const ProxConfig& cfg) {
  if (!(mu > 0.0)) throw ParameterError("inner_solve: strong convexity modulus must be > 0");
  if (!(lambda > 0.0)) throw ParameterError("inner_solve: lambda must be > 0");
  h.require_in_domain(start);
  const double t_safe = 1.0 / lambda;

  Point p = start;
  Point best = start;
  Probe best_probe = probe(h, start);
  int iters = 0;
  int stall = 0;
  for (int j = 0; iters < cfg.max_inner; ++j) {
    const Probe pr = j == 0 ? best_probe : probe(h, p);
    if (pr.value < best_probe.value) {
      best = p;
      best_probe = pr;
      stall = 0;
    } else if (j > 0) {
      ++stall;
    }
    if (pr.min_norm.norm <= cfg.inner_tol) return InnerResult{p, iters, pr.min_norm.norm};
    if (stall >= 10) break;

    double t = std::min(2.0 / (mu * (j + 2)), t_safe);
    std::optional<Point> next;
    for (int halve = 0; halve < 60 && !next; ++halve, t *= 0.5) {
      try {
        Point q = exp_map(p, -t * pr.min_norm.g);
        if (evaluable(h, q)) next = std::move(q);
      } catch (const RangeError&) {
      } catch (const DomainError&) {
      }
    }
    ++iters;
    if (!next) break;
    p = std::move(*next);
  }
  if (const Probe last = probe(h, p); last.value < best_probe.value) {
    best = p;
    best_probe = last;
  }

  std::optional<Point> polished;
  if (h.manifold.dim() == 1) {
    polished = bisection_polish(h, best, mu, iters);
  } else {
    polished = prox_linear_polish(h, best, lambda, cfg.inner_tol, std::max(cfg.max_inner, 200),
                                  iters);
  }
  if (polished) {
    const Probe pp = probe(h, *polished);
    if (pp.value <= best_probe.value || pp.min_norm.norm <= cfg.inner_tol) {
      best = *polished;
      best_probe = pp;
    }
  }
  if (best_probe.min_norm.norm <= cfg.inner_tol) return InnerResult{best, iters, best_probe.min_norm.norm};

  std::ostringstream os;
  os << "inner solver did not reach inner_tol " << cfg.inner_tol << " (best subgradient norm "
     << best_probe.min_norm.norm << " after " << iters << " iterations)";
  throw InnerCapError(os.str(), best, iters, best_probe.min_norm.norm);
}

double prox_threshold(const MaxObjective& obj, double lipschitz_estimate) {
  return obj.convex_pieces ? 0.0 : lipschitz_estimate;
}

StepResult prox_step(const MaxObjective& obj, const Point& p_k, double lambda, double threshold,
                     const ProxConfig& cfg) {
  if (!(lambda > threshold)) {
    std::ostringstream os;
    os << "prox_step: lambda " << lambda << " must exceed " << threshold;
    throw ParameterError(os.str());
  }
  obj.require_in_domain(p_k);
  const MaxObjective h = with_prox_term(obj, p_k, lambda);
  InnerResult r = inner_solve(h, p_k, lambda - threshold, lambda, cfg);
  return StepResult{std::move(r.point), r.iterations, r.subgrad_norm};
}

double residual(const Point& p_next, const Point& p_k, double lambda) {
  return lambda * dist(p_next, p_k);
}

Trace solve(const MaxObjective& obj, const Point& p0, const LambdaSchedule& sched,
            const ProxConfig& cfg, const std::optional<Point>& level_ref) {
  cfg.validate();
  obj.require_in_domain(p0);
  const double f0 = eval_f(obj, p0).value;

  Trace trace{p0, {}, Termination::MaxIters, {}, {}};
  std::optional<double> level;
  if (level_ref && cfg.level_guard != LevelGuard::Off) {
    level = eval_f(obj, *level_ref).value;
    if (f0 > *level) {
      std::ostringstream os;
      os << "start point has f = " << f0 << " above the level f(q) = " << *level;
      if (cfg.level_guard == LevelGuard::Error) throw LevelSetError(os.str());
      trace.warnings.push_back(os.str());
    }
  }

  Point p = p0;
  for (int k = 0; k < cfg.max_outer; ++k) {
    const double lambda = sched.at(static_cast<std::size_t>(k));
    IterationRecord rec{k, p, 0.0, 0.0, 0.0, lambda, 0, 0.0};
    try {
      StepResult step = prox_step(obj, p, lambda, sched.lower(), cfg);
      rec.point = std::move(step.p_next);
      rec.inner_iters = step.inner_iters;
      rec.f_value = eval_f(obj, rec.point).value;
      rec.step_dist = dist(rec.point, p);
      rec.residual = lambda * rec.step_dist;
      rec.subgrad_norm = min_norm_subgradient(clarke_subdiff(obj, rec.point)).norm;
    } catch (const Error& e) {
      trace.termination = Termination::Error;
      trace.error = e.what();
      return trace;
    }

    trace.records.push_back(rec);
    if (level && rec.f_value > *level + 1e-12 * std::max(1.0, std::abs(*level))) {
      std::ostringstream os;
      os << "iterate " << k << " left the level set: f = " << rec.f_value << " > " << *level;
      if (cfg.level_guard == LevelGuard::Error) {
        trace.termination = Termination::Error;
        trace.error = os.str();
        return trace;
      }
      if (cfg.level_guard == LevelGuard::Warn) trace.warnings.push_back(os.str());
    }
    if (rec.residual <= cfg.outer_tol) {
      trace.termination = Termination::Stationary;
      return trace;
    }
    p = rec.point;
  }
  trace.termination = Termination::MaxIters;
  return trace;
}

} // namespace hprox
