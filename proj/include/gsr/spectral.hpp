#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "errors.hpp"

namespace gsr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense real symmetric matrix. Symmetry is checked exactly on construction.
class SymMatrix {
public:
  explicit SymMatrix(Matrix entries) : m_(std::move(entries)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols()) throw InputError("SymMatrix: must be square with n >= 1");
    for (Eigen::Index j = 0; j < m_.cols(); ++j)
      for (Eigen::Index i = j + 1; i < m_.rows(); ++i)
        if (!(m_(i, j) == m_(j, i)) && !(std::isnan(m_(i, j)) && std::isnan(m_(j, i))))
          throw InputError("SymMatrix: entries are not symmetric");
  }

  static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::Identity(n, n)); }
  static SymMatrix zero(std::size_t n) { return SymMatrix(Matrix::Zero(n, n)); }

  std::size_t size() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& dense() const noexcept { return m_; }

private:
  Matrix m_;
};

/// Eigenpairs of a symmetric matrix: eigenvalues ascending, eigenvector
/// column i paired with eigenvalue i, each column's first non-negligible
/// component positive.
struct EigenDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;

  std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
};

namespace detail {

// Components below this magnitude are treated as zero when fixing signs.
inline constexpr double kSignTolerance = 1e-10;

inline void canonicalize_signs(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      if (std::abs(vectors(r, c)) > kSignTolerance) {
        if (vectors(r, c) < 0) vectors.col(c) = -vectors.col(c);
        break;
      }
    }
  }
}

}  // namespace detail

/// Full eigendecomposition (Householder tridiagonalization followed by
/// implicit symmetric QR). Throws InputError on non-finite entries and
/// NumericalError, carrying ||A U - U diag(w)||_F, if the iteration fails.
inline EigenDecomposition sym_eigen(const SymMatrix& m) {
  const Matrix& a = m.dense();
  if (!a.allFinite()) throw InputError("sym_eigen: matrix has non-finite entries");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    double residual = std::numeric_limits<double>::infinity();
    if (solver.eigenvectors().allFinite())
      residual = (a * solver.eigenvectors() - solver.eigenvectors() * solver.eigenvalues().asDiagonal()).norm();
    throw NumericalError("sym_eigen: QR iteration did not converge", residual);
  }
  EigenDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  detail::canonicalize_signs(out.eigenvectors);
  return out;
}

inline Vector matvec(const SymMatrix& m, const Vector& v) {
  detail::require_same_size(m.size(), static_cast<std::size_t>(v.size()), "matvec");
  return m.dense() * v;
}

/// ||U diag(w) U^T - A||_F / ||A||_F (plain norm when A == 0).
inline double reconstruction_error(const SymMatrix& m, const EigenDecomposition& e) {
  const Matrix rebuilt = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose();
  const double scale = m.dense().norm();
  const double diff = (rebuilt - m.dense()).norm();
  return scale > 0 ? diff / scale : diff;
}

/// ||U^T U - I||_F.
inline double orthogonality_error(const EigenDecomposition& e) {
  const auto n = e.eigenvectors.cols();
  return (e.eigenvectors.transpose() * e.eigenvectors - Matrix::Identity(n, n)).norm();
}

}  // namespace gsr
