#pragma once

// Proximal point iteration p^{k+1} = argmin f(p) + (lambda_k/2) d^2(p, p^k)
// for max-of-smooth objectives, with inexact strongly convex inner solves.

#include "hprox/errors.hpp"
#include "hprox/manifold.hpp"
#include "hprox/objective.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hprox {

/// Regularization parameters lambda_k with lower < lambda_k <= upper.
/// `lower` is the prox threshold: sup L_tau, or 0 for convex pieces.
class LambdaSchedule {
public:
  static LambdaSchedule constant(double lambda, double lower, double upper);
  /// Past the end of `values` the last entry is held.
  static LambdaSchedule sequence(std::vector<double> values, double lower, double upper);

  double at(std::size_t k) const;
  double min_value() const;
  bool is_constant() const noexcept { return values_.size() == 1; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

private:
  LambdaSchedule(std::vector<double> values, double lower, double upper);

  std::vector<double> values_;
  double lower_;
  double upper_;
};

enum class LevelGuard { Error, Warn, Off };

struct ProxConfig {
  double outer_tol = 1e-8;
  double inner_tol = 1e-10;
  int max_outer = 10000;
  int max_inner = 500;
  LevelGuard level_guard = LevelGuard::Error;

  void validate() const;
};

struct IterationRecord {
  int k = 0;
  Point point;
  double f_value = 0.0;
  /// d(p^{k+1}, p^k)
  double step_dist = 0.0;
  /// lambda_k d(p^{k+1}, p^k), the norm of the stationarity certificate.
  double residual = 0.0;
  double lambda = 0.0;
  int inner_iters = 0;
  /// Min-norm element of the subdifferential hull of f at `point`.
  double subgrad_norm = 0.0;
};

enum class Termination { Stationary, MaxIters, Error };

std::string to_string(Termination t);

struct Trace {
  Point start;
  std::vector<IterationRecord> records;
  Termination termination = Termination::MaxIters;
  std::string error;
  std::vector<std::string> warnings;
};

/// Raised when the inner solver exhausts its budget; carries the best iterate.
class InnerCapError : public Error {
public:
  InnerCapError(const std::string& what, Point best, int iterations, double subgrad_norm)
      : Error(what), best_(std::move(best)), iterations_(iterations), subgrad_norm_(subgrad_norm) {}

  const Point& best() const noexcept { return best_; }
  int iterations() const noexcept { return iterations_; }
  double subgrad_norm() const noexcept { return subgrad_norm_; }

private:
  Point best_;
  int iterations_;
  double subgrad_norm_;
};

struct InnerResult {
  Point point;
  int iterations = 0;
  /// Min-norm subgradient of h at `point`.
  double subgrad_norm = 0.0;
};

/// Minimizes a mu-strongly convex max objective h. Riemannian subgradient
/// descent with t_j = min(2 / (mu (j + 2)), 1 / lambda) along min-norm
/// subgradients, then a polish: bisection on the one-sided derivative for
/// dim 1, prox-linear model steps otherwise.
InnerResult inner_solve(const MaxObjective& h, const Point& start, double mu, double lambda,
                        const ProxConfig& cfg);

struct StepResult {
  Point p_next;
  int inner_iters = 0;
  double subgrad_norm = 0.0;
};

/// One proximal step from p_k. Requires lambda > threshold.
StepResult prox_step(const MaxObjective& obj, const Point& p_k, double lambda, double threshold,
                     const ProxConfig& cfg);

/// Strict lower bound for lambda: sup L_tau, or 0 when every piece is convex.
double prox_threshold(const MaxObjective& obj, double lipschitz_estimate);

double residual(const Point& p_next, const Point& p_k, double lambda);

/// Runs prox steps from p0 until the residual drops to cfg.outer_tol or
/// cfg.max_outer steps are taken. Step failures end the trace with
/// Termination::Error; invalid inputs throw.
Trace solve(const MaxObjective& obj, const Point& p0, const LambdaSchedule& sched,
            const ProxConfig& cfg, const std::optional<Point>& level_ref = std::nullopt);

} // namespace hprox
