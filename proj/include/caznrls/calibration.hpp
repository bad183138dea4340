#pragma once

#include "caznrls/linalg.hpp"
#include "caznrls/surrogate.hpp"

#include <optional>

namespace caznrls {

// Frobenius-nearest matrix in {W : W >= eps_hat I} together with the
// eigensystem of the input it was built from.
struct PsdProjection {
  Matrix sigma_tilde;
  Vector eigvals;  // of the input, descending
  Matrix eigvecs;
};

// The calibrated least-squares pair. z_tilde is the p x p symmetric factor
//   z_tilde = sqrt(n) P diag(sqrt(max(theta_i, eps))) P^T
// so that z_tilde^T z_tilde / n == sigma_tilde and z_tilde^T y_tilde / n == xi_hat.
struct CalibratedPair {
  Matrix z_tilde;
  Vector y_tilde;
  Matrix sigma_tilde;
  Vector eigvals;  // eigenvalues theta of sigma_hat, descending
  Matrix eigvecs;
  double eps_hat = 0.0;
  Index n = 0;

  Index p() const { return y_tilde.size(); }
};

PsdProjection psd_project(const Matrix& sigma_hat, double eps_hat);

// Scale-aware floor 1e-2 * max(1, theta_1).
double default_eps_hat(double top_eigenvalue);

// One eigendecomposition of pair.sigma_hat. When eps_hat is empty the
// default floor is derived from the same decomposition.
CalibratedPair calibrate(const SurrogatePair& pair,
                         std::optional<double> eps_hat = std::nullopt);

}  // namespace caznrls
