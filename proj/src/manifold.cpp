#include "hprox/manifold.hpp"

#include "hprox/errors.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace hprox {

namespace {

void require_same_manifold(const Manifold& a, const Manifold& b, const char* op) {
  if (a != b) {
    std::ostringstream os;
    os << op << ": manifold mismatch (" << a << " vs " << b << ")";
    throw ContractError(os.str());
  }
}

void require_base(const Point& p, const Tangent& v, const char* op) {
  if (v.base() != p) {
    std::ostringstream os;
    os << op << ": tangent based at " << v.base() << " used at " << p;
    throw ContractError(os.str());
  }
}

void require_same_base(const Tangent& a, const Tangent& b, const char* op) {
  if (a.base() != b.base()) {
    std::ostringstream os;
    os << op << ": tangents based at different points";
    throw ContractError(os.str());
  }
}

template <class F>
std::ostream& print_array(std::ostream& os, const std::vector<double>& xs, F&& prefix) {
  prefix();
  os << '(';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ", ";
    os << xs[i];
  }
  return os << ')';
}

} // namespace

Manifold::Manifold(Geometry geometry, std::size_t dim) : geometry_(geometry), dim_(dim) {
  if (dim == 0) throw ContractError("manifold dimension must be at least 1");
}

std::string Manifold::name() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Manifold& m) {
  os << (m.geometry() == Geometry::Euclidean ? "Euclidean" : "LogPositive") << '(' << m.dim()
     << ')';
  return os;
}

Point::Point(Manifold manifold, std::vector<double> coords)
    : manifold_(manifold), coords_(std::move(coords)) {
  if (coords_.size() != manifold_.dim()) {
    std::ostringstream os;
    os << "point has " << coords_.size() << " coordinates, " << manifold_ << " needs "
       << manifold_.dim();
    throw ContractError(os.str());
  }
  for (double x : coords_) {
    if (!std::isfinite(x)) throw DomainError("point coordinate is not finite");
    if (manifold_.geometry() == Geometry::LogPositive && !(x > kMinPositiveCoord)) {
      std::ostringstream os;
      os << "LogPositive coordinate " << x << " is not above " << kMinPositiveCoord;
      throw DomainError(os.str());
    }
  }
}

std::ostream& operator<<(std::ostream& os, const Point& p) {
  return print_array(os, p.coords(), [] {});
}

Tangent::Tangent(Point base, std::vector<double> coords)
    : base_(std::move(base)), coords_(std::move(coords)) {
  if (coords_.size() != base_.dim())
    throw ContractError("tangent dimension does not match its base point");
  for (double c : coords_)
    if (!std::isfinite(c)) throw DomainError("tangent coordinate is not finite");
}

Tangent Tangent::zero(const Point& base) {
  return Tangent(base, std::vector<double>(base.dim(), 0.0));
}

Tangent Tangent::basis(const Point& base, std::size_t i) {
  if (i >= base.dim()) throw ContractError("basis index out of range");
  std::vector<double> c(base.dim(), 0.0);
  c[i] = 1.0;
  return Tangent(base, std::move(c));
}

Tangent& Tangent::operator+=(const Tangent& other) {
  require_same_base(*this, other, "tangent +");
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += other.coords_[i];
  return *this;
}

Tangent& Tangent::operator-=(const Tangent& other) {
  require_same_base(*this, other, "tangent -");
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= other.coords_[i];
  return *this;
}

Tangent& Tangent::operator*=(double s) {
  for (double& c : coords_) c *= s;
  return *this;
}

Tangent operator+(Tangent a, const Tangent& b) { return a += b; }
Tangent operator-(Tangent a, const Tangent& b) { return a -= b; }
Tangent operator-(Tangent a) { return a *= -1.0; }
Tangent operator*(double s, Tangent v) { return v *= s; }
Tangent operator*(Tangent v, double s) { return v *= s; }

std::ostream& operator<<(std::ostream& os, const Tangent& v) {
  return print_array(os, v.coords(), [&] { os << v.base() << ':'; });
}

double inner(const Point& p, const Tangent& u, const Tangent& v) {
  require_base(p, u, "inner");
  require_base(p, v, "inner");
  double acc = 0.0;
  if (p.manifold().geometry() == Geometry::Euclidean) {
    for (std::size_t i = 0; i < p.dim(); ++i) acc += u[i] * v[i];
  } else {
    for (std::size_t i = 0; i < p.dim(); ++i) acc += (u[i] / p[i]) * (v[i] / p[i]);
  }
  return acc;
}

double norm(const Point& p, const Tangent& v) {
  require_base(p, v, "norm");
  double acc = 0.0;
  const bool logpos = p.manifold().geometry() == Geometry::LogPositive;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double c = logpos ? v[i] / p[i] : v[i];
    acc += c * c;
  }
  return std::sqrt(acc);
}

double dist(const Point& p, const Point& q) {
  require_same_manifold(p.manifold(), q.manifold(), "dist");
  double acc = 0.0;
  const bool logpos = p.manifold().geometry() == Geometry::LogPositive;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double d = logpos ? std::log(q[i] / p[i]) : q[i] - p[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

Point exp_map(const Point& p, const Tangent& v) {
  require_base(p, v, "exp_map");
  std::vector<double> out(p.dim());
  if (p.manifold().geometry() == Geometry::Euclidean) {
    for (std::size_t i = 0; i < p.dim(); ++i) out[i] = p[i] + v[i];
  } else {
    for (std::size_t i = 0; i < p.dim(); ++i) {
      const double e = v[i] / p[i];
      if (!(std::abs(e) <= kMaxExponent)) {
        std::ostringstream os;
        os << "exp_map: exponent " << e << " outside [-" << kMaxExponent << ", " << kMaxExponent
           << "]";
        throw RangeError(os.str());
      }
      out[i] = p[i] * std::exp(e);
    }
  }
  return Point(p.manifold(), std::move(out));
}

Tangent log_map(const Point& p, const Point& q) {
  require_same_manifold(p.manifold(), q.manifold(), "log_map");
  std::vector<double> out(p.dim());
  if (p.manifold().geometry() == Geometry::Euclidean) {
    for (std::size_t i = 0; i < p.dim(); ++i) out[i] = q[i] - p[i];
  } else {
    for (std::size_t i = 0; i < p.dim(); ++i) out[i] = p[i] * std::log(q[i] / p[i]);
  }
  return Tangent(p, std::move(out));
}

Tangent transport(const Point& p, const Point& q, const Tangent& v) {
  require_same_manifold(p.manifold(), q.manifold(), "transport");
  require_base(p, v, "transport");
  std::vector<double> out = v.coords();
  if (p.manifold().geometry() == Geometry::LogPositive) {
    for (std::size_t i = 0; i < p.dim(); ++i) out[i] *= q[i] / p[i];
  }
  return Tangent(q, std::move(out));
}

Tangent differential_exp(const Point& p, const Tangent& w, const Tangent& u) {
  require_base(p, w, "differential_exp");
  require_base(p, u, "differential_exp");
  Point q = exp_map(p, w);
  std::vector<double> out = u.coords();
  if (p.manifold().geometry() == Geometry::LogPositive) {
    for (std::size_t i = 0; i < p.dim(); ++i) out[i] *= std::exp(w[i] / p[i]);
  }
  return Tangent(std::move(q), std::move(out));
}

Tangent grad_half_sq_dist(const Point& q, const Point& pbar) {
  return -log_map(q, pbar);
}

Point geodesic(const Point& p, const Tangent& v, double t) { return exp_map(p, t * v); }

} // namespace hprox
