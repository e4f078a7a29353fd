#include "rashlab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "rashlab/dataset.hpp"
#include "rashlab/error.hpp"

namespace rashlab {

Matrix covariance_matrix(const Matrix& X) {
  const std::size_t n = X.rows(), p = X.cols();
  Matrix cov(p, p, 0.0);
  if (n < 2) return cov;
  const ColumnStats st = column_stats(X);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = X.row(r);
    for (std::size_t i = 0; i < p; ++i) {
      const double di = row[i] - st.mean[i];
      for (std::size_t j = i; j < p; ++j) cov(i, j) += di * (row[j] - st.mean[j]);
    }
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) {
      cov(i, j) /= static_cast<double>(n - 1);
      cov(j, i) = cov(i, j);
    }
  return cov;
}

std::vector<double> symmetric_eigenvalues(Matrix a) {
  const std::size_t p = a.rows();
  if (p == 0) return {};
  if (a.cols() != p) raise(errc::dimension_mismatch, "eigenvalues need a square matrix");

  // Cyclic Jacobi: rotate away the largest off-diagonal entries until the
  // off-diagonal mass is negligible.
  const std::size_t max_sweeps = 100;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i + 1; j < p; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-22) break;

    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        if (std::fabs(a(i, j)) < 1e-300) continue;
        const double theta = (a(j, j) - a(i, i)) / (2.0 * a(i, j));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < p; ++k) {
          const double aki = a(k, i), akj = a(k, j);
          a(k, i) = c * aki - s * akj;
          a(k, j) = s * aki + c * akj;
        }
        for (std::size_t k = 0; k < p; ++k) {
          const double aik = a(i, k), ajk = a(j, k);
          a(i, k) = c * aik - s * ajk;
          a(j, k) = s * aik + c * ajk;
        }
      }
    }
  }

  std::vector<double> values(p);
  for (std::size_t i = 0; i < p; ++i) values[i] = std::max(0.0, a(i, i));
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

std::vector<double> solve_spd(Matrix a, std::vector<double> b) {
  const std::size_t p = a.rows();
  if (a.cols() != p || b.size() != p) raise(errc::dimension_mismatch, "solve_spd shape mismatch");

  // Cholesky factorization A = L L^T.
  Matrix l(p, p, 0.0);
  bool ok = true;
  for (std::size_t i = 0; i < p && ok; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
      if (i == j) {
        if (sum <= 0.0) {
          ok = false;
          break;
        }
        l(i, i) = std::sqrt(sum);
      } else {
        l(i, j) = sum / l(j, j);
      }
    }
  }
  if (ok) {
    std::vector<double> y(p);
    for (std::size_t i = 0; i < p; ++i) {
      double sum = b[i];
      for (std::size_t k = 0; k < i; ++k) sum -= l(i, k) * y[k];
      y[i] = sum / l(i, i);
    }
    std::vector<double> x(p);
    for (std::size_t i = p; i-- > 0;) {
      double sum = y[i];
      for (std::size_t k = i + 1; k < p; ++k) sum -= l(k, i) * x[k];
      x[i] = sum / l(i, i);
    }
    return x;
  }

  // Fallback: Gaussian elimination with partial pivoting.
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < p; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(pivot, col))) pivot = r;
    if (std::fabs(a(pivot, col)) < 1e-300)
      raise(errc::degenerate_variance, "singular matrix in solve_spd");
    if (pivot != col) {
      for (std::size_t c = 0; c < p; ++c) std::swap(a(col, c), a(pivot, c));
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < p; ++r) {
      const double f = a(r, col) / a(col, col);
      for (std::size_t c = col; c < p; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(p);
  for (std::size_t i = p; i-- > 0;) {
    double sum = b[i];
    for (std::size_t k = i + 1; k < p; ++k) sum -= a(i, k) * x[k];
    x[i] = sum / a(i, i);
  }
  return x;
}

}  // namespace rashlab
