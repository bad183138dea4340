#include "caznrls/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace caznrls {

namespace {

void check_data(const Matrix& z, const Vector& y, const char* who) {
  if (z.rows() < 1 || z.cols() < 1)
    throw std::invalid_argument(std::string(who) + ": design must be non-empty");
  if (y.size() != z.rows())
    throw std::invalid_argument(std::string(who) + ": response has " +
                                std::to_string(y.size()) + " entries but design has " +
                                std::to_string(z.rows()) + " rows");
}

Matrix gram(const Matrix& z) {
  const double inv_n = 1.0 / static_cast<double>(z.rows());
  Matrix g = Matrix::Zero(z.cols(), z.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose(), inv_n);
  Matrix full = g.selfadjointView<Eigen::Lower>();
  return full;
}

Vector cross(const Matrix& z, const Vector& y) {
  return z.transpose() * y / static_cast<double>(z.rows());
}

}  // namespace

void validate(const ErrorModel& model, Index p) {
  std::visit(
      [p](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AdditiveError>) {
          if (m.sigma_a.rows() != p || m.sigma_a.cols() != p)
            throw std::invalid_argument("additive error: sigma_A must be p x p");
          if (!is_exactly_symmetric(m.sigma_a))
            throw std::invalid_argument("additive error: sigma_A must be symmetric");
          const Eigen::SelfAdjointEigenSolver<Matrix> es(m.sigma_a,
                                                          Eigen::EigenvaluesOnly);
          const Vector& ev = es.eigenvalues();  // ascending
          const double tol = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
          if (ev(0) < -tol)
            throw std::invalid_argument("additive error: sigma_A must be PSD");
        } else if constexpr (std::is_same_v<T, MultiplicativeError>) {
          if (m.mu_m.size() != p || m.sigma_m.rows() != p || m.sigma_m.cols() != p)
            throw std::invalid_argument("multiplicative error: dimension mismatch");
          if ((m.mu_m.array() <= 0.0).any())
            throw std::invalid_argument("multiplicative error: mu_M must be positive");
          const Matrix second = m.sigma_m + m.mu_m * m.mu_m.transpose();
          if ((second.array() <= 0.0).any())
            throw std::invalid_argument(
                "multiplicative error: sigma_M + mu mu^T must be entrywise positive");
        } else {
          if (!(m.tau >= 0.0 && m.tau < 1.0))
            throw std::invalid_argument("missing-data error: tau must lie in [0, 1)");
        }
      },
      model);
}

SurrogatePair additive_surrogate(const Matrix& z, const Vector& y,
                                 const Matrix& sigma_a) {
  check_data(z, y, "additive_surrogate");
  if (sigma_a.rows() != z.cols() || sigma_a.cols() != z.cols())
    throw std::invalid_argument("additive_surrogate: sigma_A must be p x p");
  SurrogatePair out;
  out.sigma_hat = symmetrize(gram(z) - sigma_a);
  out.xi_hat = cross(z, y);
  out.n = z.rows();
  return out;
}

SurrogatePair multiplicative_surrogate(const Matrix& z, const Vector& y,
                                       const Vector& mu_m, const Matrix& sigma_m) {
  check_data(z, y, "multiplicative_surrogate");
  const Index p = z.cols();
  if (mu_m.size() != p || sigma_m.rows() != p || sigma_m.cols() != p)
    throw std::invalid_argument("multiplicative_surrogate: dimension mismatch");
  if ((mu_m.array() == 0.0).any())
    throw std::invalid_argument("multiplicative_surrogate: mu_M has a zero entry");
  const Matrix divisor = sigma_m + mu_m * mu_m.transpose();
  if ((divisor.array() == 0.0).any())
    throw std::invalid_argument(
        "multiplicative_surrogate: sigma_M + mu mu^T has a zero entry");
  SurrogatePair out;
  out.sigma_hat = symmetrize(gram(z).cwiseQuotient(divisor));
  out.xi_hat = cross(z, y).cwiseQuotient(mu_m);
  out.n = z.rows();
  return out;
}

SurrogatePair missing_surrogate(const Matrix& z, const Vector& y, double tau) {
  check_data(z, y, "missing_surrogate");
  if (!(tau >= 0.0 && tau < 1.0))
    throw std::invalid_argument("missing_surrogate: tau must lie in [0, 1)");
  const double keep = 1.0 - tau;
  Matrix s = gram(z) / (keep * keep);
  s.diagonal() *= keep;  // diagonal divisor is keep, not keep^2
  SurrogatePair out;
  out.sigma_hat = symmetrize(s);
  out.xi_hat = cross(z, y) / keep;
  out.n = z.rows();
  return out;
}

SurrogatePair make_surrogate(const Matrix& z, const Vector& y,
                             const ErrorModel& model) {
  return std::visit(
      [&](const auto& m) -> SurrogatePair {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AdditiveError>)
          return additive_surrogate(z, y, m.sigma_a);
        else if constexpr (std::is_same_v<T, MultiplicativeError>)
          return multiplicative_surrogate(z, y, m.mu_m, m.sigma_m);
        else
          return missing_surrogate(z, y, m.tau);
      },
      model);
}

}  // namespace caznrls
