#pragma once

// Small quadratic programs over the unit simplex. Matrices are dense,
// row-major, n x n.

#include <cstddef>
#include <vector>

namespace hprox {

struct SimplexSolution {
  std::vector<double> weights;
  double objective = 0.0;
  int iterations = 0;
};

/// Minimum-norm point of the convex hull of implicit vectors, given their
/// Gram matrix. Closed form for n <= 2, Wolfe's corral method otherwise.
SimplexSolution min_norm_weights(const std::vector<double>& gram, std::size_t n,
                                 double tol = 1e-10, int max_iter = 1000);

/// Minimizes 1/2 w'Qw + c'w over the simplex (Q positive semidefinite) with
/// away-step Frank-Wolfe and exact line search. Stops when the Frank-Wolfe
/// gap is <= tol.
SimplexSolution simplex_qp(const std::vector<double>& q, const std::vector<double>& c,
                           std::size_t n, double tol = 1e-12, int max_iter = 20000);

} // namespace hprox
