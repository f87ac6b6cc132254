#ifndef MCCA_NUMERICS_HPP
#define MCCA_NUMERICS_HPP

// Dense symmetric eigendecomposition, truncated SVD and inverse square roots
// of PSD matrices. Eigen does the heavy lifting; this layer pins down ordering
// (descending) and a deterministic sign for every returned vector so fitted
// models are reproducible and comparable across runs.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

#include "mcca/error.hpp"

namespace mcca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultEigFloor = 1e-10;
inline constexpr double kNegativeEigTolerance = 1e-8;

struct SymEigResult {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // column j pairs with eigenvalues(j)
};

struct SvdResult {
  Matrix u;
  Vector singular_values;  // descending, >= 0
  Matrix v;
  Index rank = 0;
};

namespace detail {

// Index of the largest-magnitude entry; ties go to the lowest index.
inline Index dominant_entry(const Eigen::Ref<const Vector>& col) {
  Index best = 0;
  double best_abs = -1.0;
  for (Index i = 0; i < col.size(); ++i) {
    const double a = std::abs(col(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  return best;
}

}  // namespace detail

/// Flips columns of `basis` so that each column's largest-magnitude entry is
/// positive. When `partner` is non-null the same flips are applied to it, which
/// keeps singular pairs (u_j, v_j) consistent.
inline void canonicalize_signs(Matrix& basis, Matrix* partner = nullptr) {
  for (Index j = 0; j < basis.cols(); ++j) {
    if (basis.rows() == 0) break;
    const Index i = detail::dominant_entry(basis.col(j));
    if (basis(i, j) < 0.0) {
      basis.col(j) *= -1.0;
      if (partner != nullptr) partner->col(j) *= -1.0;
    }
  }
}

inline SymEigResult sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw usage_error("sym_eig: matrix is " + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + ", expected square");
  }
  SymEigResult out;
  if (a.rows() == 0) return out;

  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw numerical_error("sym_eig: eigensolver did not converge");
  }
  // Eigen returns ascending order.
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  canonicalize_signs(out.eigenvectors);
  return out;
}

/// Q diag(max(lambda, eig_floor)^{-1/2}) Q^T for a symmetric PSD matrix.
/// Slightly negative eigenvalues from round-off are clamped; anything below
/// -1e-8 (relative to the matrix scale) is rejected.
inline Matrix inv_sqrt_psd(const Matrix& a, double eig_floor = kDefaultEigFloor) {
  if (!(eig_floor > 0.0)) {
    throw usage_error("inv_sqrt_psd: eig_floor must be positive");
  }
  const SymEigResult eig = sym_eig(a);
  if (eig.eigenvalues.size() == 0) return Matrix(0, 0);

  const double scale = std::max(1.0, std::abs(eig.eigenvalues(0)));
  const double smallest = eig.eigenvalues(eig.eigenvalues.size() - 1);
  if (smallest < -kNegativeEigTolerance * scale) {
    throw numerical_error("inv_sqrt_psd: matrix is not positive semidefinite (eigenvalue " +
                          std::to_string(smallest) + ")");
  }
  Vector d(eig.eigenvalues.size());
  for (Index i = 0; i < d.size(); ++i) {
    d(i) = 1.0 / std::sqrt(std::max(eig.eigenvalues(i), eig_floor));
  }
  Matrix out = eig.eigenvectors * d.asDiagonal() * eig.eigenvectors.transpose();
  return 0.5 * (out + out.transpose());
}

/// Top-k singular triplets of `a`, descending. The left vector of each pair is
/// sign-canonicalized and the right vector follows it.
inline SvdResult svd_truncated(const Matrix& a, Index k) {
  const Index max_rank = std::min(a.rows(), a.cols());
  if (k < 1 || k > max_rank) {
    throw usage_error("svd_truncated: k=" + std::to_string(k) + " outside [1, " +
                      std::to_string(max_rank) + "]");
  }
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw numerical_error("svd_truncated: SVD did not converge");
  }
  SvdResult out;
  out.rank = k;
  out.u = svd.matrixU().leftCols(k);
  out.v = svd.matrixV().leftCols(k);
  out.singular_values = svd.singularValues().head(k);
  canonicalize_signs(out.u, &out.v);
  return out;
}

}  // namespace mcca

#endif  // MCCA_NUMERICS_HPP
