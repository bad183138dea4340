#include "caznrls/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace caznrls {

namespace {

void check_input(const Matrix& sigma_hat, double eps_hat) {
  if (!(eps_hat > 0.0) || !std::isfinite(eps_hat))
    throw std::invalid_argument("calibration: eps_hat must be positive and finite");
  if (!sigma_hat.allFinite())
    throw std::invalid_argument("calibration: surrogate has non-finite entries");
  if (!is_exactly_symmetric(sigma_hat))
    throw std::invalid_argument("calibration: surrogate must be exactly symmetric");
}

}  // namespace

double default_eps_hat(double top_eigenvalue) {
  return 1e-2 * std::max(1.0, top_eigenvalue);
}

PsdProjection psd_project(const Matrix& sigma_hat, double eps_hat) {
  check_input(sigma_hat, eps_hat);
  SymEigen eig = sym_eig(sigma_hat);
  PsdProjection out;
  out.sigma_tilde =
      spectral_apply(eig, [eps_hat](double t) { return std::max(t, eps_hat); });
  out.eigvals = std::move(eig.values);
  out.eigvecs = std::move(eig.vectors);
  return out;
}

CalibratedPair calibrate(const SurrogatePair& pair, std::optional<double> eps_hat) {
  const Index p = pair.p();
  if (pair.sigma_hat.rows() != p || pair.sigma_hat.cols() != p)
    throw std::invalid_argument("calibrate: surrogate dimensions are inconsistent");
  if (pair.n < 1) throw std::invalid_argument("calibrate: sample count must be >= 1");
  if (!pair.sigma_hat.allFinite() || !pair.xi_hat.allFinite())
    throw std::invalid_argument("calibrate: surrogate has non-finite entries");
  if (!is_exactly_symmetric(pair.sigma_hat))
    throw std::invalid_argument("calibrate: surrogate must be exactly symmetric");

  SymEigen eig = sym_eig(pair.sigma_hat);
  const double eps = eps_hat ? *eps_hat : default_eps_hat(eig.values(0));
  check_input(pair.sigma_hat, eps);

  const double sqrt_n = std::sqrt(static_cast<double>(pair.n));
  Vector clamped = eig.values.cwiseMax(eps);
  Vector root = clamped.cwiseSqrt();
  Vector inv_root = root.cwiseInverse();

  const Matrix& pm = eig.vectors;
  CalibratedPair out;
  out.sigma_tilde = symmetrize(pm * clamped.asDiagonal() * pm.transpose());
  out.z_tilde = symmetrize(sqrt_n * (pm * root.asDiagonal() * pm.transpose()));
  out.y_tilde = sqrt_n * (pm * (inv_root.asDiagonal() * (pm.transpose() * pair.xi_hat)));
  out.eigvals = std::move(eig.values);
  out.eigvecs = std::move(eig.vectors);
  out.eps_hat = eps;
  out.n = pair.n;
  return out;
}

}  // namespace caznrls
