#pragma once

// Built-in and inline problem definitions for the experiment runner.

#include "hprox/manifold.hpp"
#include "hprox/objective.hpp"
#include "hprox/oracle.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hprox::problems {

struct Problem {
  MaxObjective objective;
  /// Box the objective is studied on; random verification points come from here.
  oracle::Region region;
  /// Points used by estimate_sup_lipschitz.
  std::vector<Point> region_samples;
  Point default_start;
  /// Kinks / known minimizers worth probing (usc checks).
  std::vector<Point> probe_points;
  std::map<std::string, double> metadata;
};

// Pieces of the one-dimensional example on (R_{++}, x^{-2}).
double example_f1(double x);
double example_f2(double x);
/// max(f1, f2) = max over tau in [0,1] of f1 + tau (f2 - f1).
double example_f(double x);

inline constexpr double kDefaultEpsilon = 0.125;

/// LogPositive(1), T = {0, 1}, phi(x, tau) = f1(x) + tau (f2(x) - f1(x)),
/// Omega = (epsilon, inf), region (epsilon, 4). Requires 0 < epsilon < 1/4.
Problem paper_example(double epsilon = kDefaultEpsilon);

/// n-fold product: sum_i f(x_i) on LogPositive(n), written as the max over
/// the 2^n bitmasks tau of sum_i phi(x_i, bit_i(tau)). 1 <= n <= 8.
Problem paper_example_product(std::size_t n, double epsilon = kDefaultEpsilon);

/// |x| = max{x, -x} on Euclidean(1), T = {-1, 1}.
Problem abs_problem();

/// x^2 / 2 on Euclidean(1), T = {0}.
Problem quadratic_problem();

/// One piece of an inline max objective,
/// phi(p) = curvature/2 ||c(p)||^2 + <linear, c(p)> + offset,
/// with c the identity chart (Euclidean) or coordinate-wise ln (LogPositive).
struct InlinePiece {
  double tau = 0.0;
  double curvature = 0.0;
  std::vector<double> linear;
  double offset = 0.0;
};

struct InlineSpec {
  Geometry geometry = Geometry::Euclidean;
  std::size_t dim = 1;
  std::vector<InlinePiece> pieces;
  std::optional<std::vector<double>> domain_lower;
  std::optional<std::vector<double>> domain_upper;
  oracle::Region region;
  std::optional<std::vector<double>> start;
};

Problem inline_problem(const InlineSpec& spec);

std::vector<std::string> builtin_names();

} // namespace hprox::problems
