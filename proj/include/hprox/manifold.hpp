#pragma once

// Geometry of the two shipped Hadamard manifolds.
//
// Euclidean(n) is R^n with the dot product. LogPositive(n) is the n-fold
// product of (R_{++}, <u,v>_x = u v / x^2). The map s -> e^s is an isometry
// from R onto each LogPositive factor, so every closed form below is exact.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace hprox {

enum class Geometry { Euclidean, LogPositive };

class Manifold {
public:
  Manifold(Geometry geometry, std::size_t dim);

  static Manifold euclidean(std::size_t dim) { return {Geometry::Euclidean, dim}; }
  static Manifold log_positive(std::size_t dim) { return {Geometry::LogPositive, dim}; }

  Geometry geometry() const noexcept { return geometry_; }
  std::size_t dim() const noexcept { return dim_; }
  std::string name() const;

  friend bool operator==(const Manifold&, const Manifold&) = default;

private:
  Geometry geometry_;
  std::size_t dim_;
};

std::ostream& operator<<(std::ostream& os, const Manifold& m);

/// LogPositive coordinates must stay above this to count as on the manifold.
inline constexpr double kMinPositiveCoord = 1e-300;
/// Largest admissible |v_i / x_i| in the LogPositive exponential.
inline constexpr double kMaxExponent = 700.0;

class Point {
public:
  /// Throws DomainError when coords are not a valid point of `manifold`.
  Point(Manifold manifold, std::vector<double> coords);

  const Manifold& manifold() const noexcept { return manifold_; }
  const std::vector<double>& coords() const noexcept { return coords_; }
  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }

  friend bool operator==(const Point&, const Point&) = default;

private:
  Manifold manifold_;
  std::vector<double> coords_;
};

std::ostream& operator<<(std::ostream& os, const Point& p);

/// A tangent vector together with the point it is anchored at.
class Tangent {
public:
  Tangent(Point base, std::vector<double> coords);

  static Tangent zero(const Point& base);
  /// The i-th coordinate basis vector at `base` (not normalized).
  static Tangent basis(const Point& base, std::size_t i);

  const Point& base() const noexcept { return base_; }
  const std::vector<double>& coords() const noexcept { return coords_; }
  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }

  Tangent& operator+=(const Tangent& other);
  Tangent& operator-=(const Tangent& other);
  Tangent& operator*=(double s);

  friend bool operator==(const Tangent&, const Tangent&) = default;

private:
  Point base_;
  std::vector<double> coords_;
};

Tangent operator+(Tangent a, const Tangent& b);
Tangent operator-(Tangent a, const Tangent& b);
Tangent operator-(Tangent a);
Tangent operator*(double s, Tangent v);
Tangent operator*(Tangent v, double s);

std::ostream& operator<<(std::ostream& os, const Tangent& v);

double inner(const Point& p, const Tangent& u, const Tangent& v);
double norm(const Point& p, const Tangent& v);
double dist(const Point& p, const Point& q);

/// exp_p(v). Throws RangeError if a LogPositive exponent leaves [-700, 700].
Point exp_map(const Point& p, const Tangent& v);
/// exp_p^{-1}(q), the initial velocity of the geodesic from p to q.
Tangent log_map(const Point& p, const Point& q);
/// Parallel transport of v (based at p) along the geodesic to q.
Tangent transport(const Point& p, const Point& q, const Tangent& v);
/// (D exp_p)_w u, based at exp_p(w).
Tangent differential_exp(const Point& p, const Tangent& w, const Tangent& u);
/// Riemannian gradient at q of 1/2 d^2(., pbar), which is -exp_q^{-1} pbar.
Tangent grad_half_sq_dist(const Point& q, const Point& pbar);
/// gamma_v(t) = exp_p(t v).
Point geodesic(const Point& p, const Tangent& v, double t);

} // namespace hprox
