#pragma once

#include "caznrls/linalg.hpp"

#include <variant>

namespace caznrls {

// Unbiased surrogate of the clean Gram pair (X^T X / n, X^T y / n).
// sigma_hat is exactly symmetric but may be indefinite.
struct SurrogatePair {
  Matrix sigma_hat;
  Vector xi_hat;
  Index n = 0;

  Index p() const { return xi_hat.size(); }
};

// Z = X + A, rows of A with known covariance sigma_a.
struct AdditiveError {
  Matrix sigma_a;
};

// Z = X o M with E[M_ij] = mu_m(j) and Cov of a row of M equal to sigma_m.
struct MultiplicativeError {
  Vector mu_m;
  Matrix sigma_m;
};

// Each entry of X is observed with probability 1 - tau, zero otherwise.
struct MissingError {
  double tau = 0.0;
};

using ErrorModel = std::variant<AdditiveError, MultiplicativeError, MissingError>;

// Throws std::invalid_argument if the model violates its invariants for a
// design with p columns.
void validate(const ErrorModel& model, Index p);

// sigma_hat = Z^T Z / n - sigma_a, xi_hat = Z^T y / n.
SurrogatePair additive_surrogate(const Matrix& z, const Vector& y,
                                 const Matrix& sigma_a);

// sigma_hat = (Z^T Z / n) ./ (sigma_m + mu mu^T), xi_hat = (Z^T y / n) ./ mu.
SurrogatePair multiplicative_surrogate(const Matrix& z, const Vector& y,
                                       const Vector& mu_m, const Matrix& sigma_m);

// Bernoulli(1 - tau) masking: diagonal divisor 1 - tau, off-diagonal (1 - tau)^2.
SurrogatePair missing_surrogate(const Matrix& z, const Vector& y, double tau);

SurrogatePair make_surrogate(const Matrix& z, const Vector& y,
                             const ErrorModel& model);

}  // namespace caznrls
