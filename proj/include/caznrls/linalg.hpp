#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace caznrls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.
struct SymEigen {
  Vector values;
  Matrix vectors;  // columns are orthonormal eigenvectors
};

// Symmetric eigendecomposition backed by LAPACK (dsyevr).
// Throws std::invalid_argument for non-square or non-finite input and
// std::runtime_error if LAPACK reports failure.
SymEigen sym_eig(const Matrix& a);

// Number of sym_eig calls made by the current thread. Used by tests to
// audit how many factorizations a routine performs.
std::uint64_t sym_eig_call_count();

// (A + A^T) / 2
Matrix symmetrize(const Matrix& a);

bool is_exactly_symmetric(const Matrix& a);
bool all_finite(const Matrix& a);

// P diag(f(theta)) P^T for a descending eigensystem.
template <typename F>
Matrix spectral_apply(const SymEigen& eig, F&& f) {
  const Index p = eig.values.size();
  Vector mapped(p);
  for (Index i = 0; i < p; ++i) mapped(i) = f(eig.values(i));
  Matrix out = eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
  return symmetrize(out);
}

// P diag(max(theta, 0)) P^T built from the positive eigenpairs only.
Matrix psd_part(const SymEigen& eig);

// Elementwise max norm.
inline double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace caznrls
