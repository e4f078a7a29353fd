#pragma once

#include <vector>

#include "rashlab/matrix.hpp"

namespace rashlab {

/// Sample covariance (n-1 normalization) of the columns of X.
Matrix covariance_matrix(const Matrix& X);

/// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations,
/// sorted descending and clamped at zero.
std::vector<double> symmetric_eigenvalues(Matrix sym);

/// Solves A x = b for symmetric positive definite A (Cholesky with a
/// Gaussian-elimination fallback for near-singular input).
std::vector<double> solve_spd(Matrix A, std::vector<double> b);

}  // namespace rashlab
