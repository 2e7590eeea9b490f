#include "hprox/simplex.hpp"

#include "hprox/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hprox {

namespace {

double quad_form(const std::vector<double>& q, const std::vector<double>& w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) acc += w[i] * q[i * n + j] * w[j];
  }
  return acc;
}

std::vector<double> mat_vec(const std::vector<double>& q, const std::vector<double>& w,
                            std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += q[i * n + j] * w[j];
  return out;
}

// Solves the affine min-norm system over `corral`:
//   [G_SS 1; 1' 0] [alpha; mu] = [0; 1].
// Returns false when the system is numerically singular.
bool affine_minimizer(const std::vector<double>& gram, std::size_t n,
                      const std::vector<std::size_t>& corral, std::vector<double>& alpha) {
  const std::size_t m = corral.size() + 1;
  std::vector<double> a(m * (m + 1), 0.0);
  double scale = 0.0;
  for (std::size_t r = 0; r < corral.size(); ++r) {
    for (std::size_t c = 0; c < corral.size(); ++c) {
      a[r * (m + 1) + c] = gram[corral[r] * n + corral[c]];
      scale = std::max(scale, std::abs(a[r * (m + 1) + c]));
    }
    a[r * (m + 1) + corral.size()] = 1.0;
    a[corral.size() * (m + 1) + r] = 1.0;
  }
  a[corral.size() * (m + 1) + m] = 1.0;
  scale = std::max(scale, 1.0);

  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(a[r * (m + 1) + col]) > std::abs(a[piv * (m + 1) + col])) piv = r;
    if (std::abs(a[piv * (m + 1) + col]) < 1e-14 * scale) return false;
    if (piv != col)
      for (std::size_t c = 0; c <= m; ++c) std::swap(a[piv * (m + 1) + c], a[col * (m + 1) + c]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = a[r * (m + 1) + col] / a[col * (m + 1) + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= m; ++c) a[r * (m + 1) + c] -= f * a[col * (m + 1) + c];
    }
  }
  alpha.assign(corral.size(), 0.0);
  for (std::size_t r = 0; r < corral.size(); ++r)
    alpha[r] = a[r * (m + 1) + m] / a[r * (m + 1) + r];
  return true;
}

} // namespace

SimplexSolution min_norm_weights(const std::vector<double>& gram, std::size_t n, double tol,
                                 int max_iter) {
  if (n == 0) throw ContractError("min_norm_weights: empty generator set");
  if (gram.size() != n * n) throw ContractError("min_norm_weights: gram size mismatch");

  SimplexSolution sol;
  sol.weights.assign(n, 0.0);
  if (n == 1) {
    sol.weights[0] = 1.0;
    sol.objective = 0.5 * gram[0];
    return sol;
  }
  if (n == 2) {
    const double denom = gram[0] - 2.0 * gram[1] + gram[3];
    double w0 = denom > 0.0 ? (gram[3] - gram[1]) / denom : (gram[0] <= gram[3] ? 1.0 : 0.0);
    w0 = std::clamp(w0, 0.0, 1.0);
    sol.weights = {w0, 1.0 - w0};
    sol.objective = 0.5 * quad_form(gram, sol.weights, n);
    return sol;
  }

  double max_sq = 0.0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    max_sq = std::max(max_sq, gram[i * n + i]);
    if (gram[i * n + i] < gram[start * n + start]) start = i;
  }
  std::vector<std::size_t> corral{start};
  std::vector<double> w(n, 0.0);
  w[start] = 1.0;
  std::vector<double> alpha;

  int it = 0;
  for (; it < max_iter; ++it) {
    const std::vector<double> gw = mat_vec(gram, w, n);
    const double xx = std::inner_product(w.begin(), w.end(), gw.begin(), 0.0);
    const std::size_t j =
        static_cast<std::size_t>(std::min_element(gw.begin(), gw.end()) - gw.begin());
    if (xx - gw[j] <= tol * std::max(max_sq, 1e-300)) break;
    if (std::find(corral.begin(), corral.end(), j) != corral.end()) break;
    corral.push_back(j);

    // Minor cycles: move toward the affine minimizer until it is interior.
    bool degenerate = false;
    for (;;) {
      if (!affine_minimizer(gram, n, corral, alpha)) {
        degenerate = true;
        break;
      }
      bool interior = true;
      for (double a : alpha)
        if (a <= 1e-15) interior = false;
      if (interior) {
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t s = 0; s < corral.size(); ++s) w[corral[s]] = alpha[s];
        break;
      }
      double theta = 1.0;
      for (std::size_t s = 0; s < corral.size(); ++s) {
        const double ws = w[corral[s]];
        if (alpha[s] <= 1e-15) theta = std::min(theta, ws / (ws - alpha[s]));
      }
      for (std::size_t s = 0; s < corral.size(); ++s)
        w[corral[s]] += theta * (alpha[s] - w[corral[s]]);
      std::vector<std::size_t> kept;
      for (std::size_t s : corral) {
        if (w[s] > 1e-15) {
          kept.push_back(s);
        } else {
          w[s] = 0.0;
        }
      }
      corral.swap(kept);
      if (corral.size() <= 1) {
        if (corral.size() == 1) w[corral[0]] = 1.0;
        break;
      }
    }
    if (degenerate) {
      // Affinely dependent corral: drop the newest vertex and finish.
      corral.pop_back();
      break;
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= total;
  }

  // Polish with Frank-Wolfe in case the corral step stalled numerically.
  SimplexSolution fw = simplex_qp(gram, std::vector<double>(n, 0.0), n, 1e-16, 200);
  sol.weights = w;
  sol.objective = 0.5 * quad_form(gram, w, n);
  sol.iterations = it;
  if (fw.objective < sol.objective) {
    sol.weights = fw.weights;
    sol.objective = fw.objective;
  }
  return sol;
}

SimplexSolution simplex_qp(const std::vector<double>& q, const std::vector<double>& c,
                           std::size_t n, double tol, int max_iter) {
  if (n == 0) throw ContractError("simplex_qp: empty problem");
  if (q.size() != n * n || c.size() != n) throw ContractError("simplex_qp: size mismatch");

  std::vector<double> w(n, 0.0);
  std::size_t start = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (0.5 * q[i * n + i] + c[i] < 0.5 * q[start * n + start] + c[start]) start = i;
  w[start] = 1.0;

  std::vector<double> qw = mat_vec(q, w, n);
  int it = 0;
  for (; it < max_iter; ++it) {
    std::vector<double> grad(n);
    for (std::size_t i = 0; i < n; ++i) grad[i] = qw[i] + c[i];
    const double gdotw = std::inner_product(grad.begin(), grad.end(), w.begin(), 0.0);
    std::size_t s = 0;
    std::size_t a = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (grad[i] < grad[s]) s = i;
      if (w[i] > 0.0 && (a == n || grad[i] > grad[a])) a = i;
    }
    const double fw_gap = gdotw - grad[s];
    if (fw_gap <= tol) break;
    const double away_gap = grad[a] - gdotw;

    // Direction d as sparse update: w + gamma * d.
    std::vector<double> d(n, 0.0);
    double gamma_max = 1.0;
    if (fw_gap >= away_gap) {
      for (std::size_t i = 0; i < n; ++i) d[i] = -w[i];
      d[s] += 1.0;
    } else {
      for (std::size_t i = 0; i < n; ++i) d[i] = w[i];
      d[a] -= 1.0;
      gamma_max = w[a] / (1.0 - w[a]);
    }
    const std::vector<double> qd = mat_vec(q, d, n);
    const double curv = std::inner_product(d.begin(), d.end(), qd.begin(), 0.0);
    const double slope = std::inner_product(grad.begin(), grad.end(), d.begin(), 0.0);
    double gamma = curv > 0.0 ? std::min(-slope / curv, gamma_max) : gamma_max;
    if (!(gamma > 0.0)) break;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] += gamma * d[i];
      if (w[i] < 1e-300) w[i] = 0.0;
      qw[i] += gamma * qd[i];
    }
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;

  SimplexSolution sol;
  sol.weights = w;
  qw = mat_vec(q, w, n);
  sol.objective = 0.5 * std::inner_product(w.begin(), w.end(), qw.begin(), 0.0) +
                  std::inner_product(c.begin(), c.end(), w.begin(), 0.0);
  sol.iterations = it;
  return sol;
}

} // namespace hprox
