#include "caznrls/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace caznrls {

namespace {
void require_a(double a) {
  if (!(a > 1.0)) throw std::invalid_argument("penalty: parameter a must exceed 1");
}
}  // namespace

double phi(double t, double a) {
  require_a(a);
  return (a - 1.0) / (a + 1.0) * t * t + 2.0 / (a + 1.0) * t;
}

double psi(double t, double a) {
  if (t < 0.0 || t > 1.0) return std::numeric_limits<double>::infinity();
  return phi(t, a);
}

double psi_conjugate(double omega, double a) {
  require_a(a);
  const double lo = 2.0 / (a + 1.0);
  const double hi = 2.0 * a / (a + 1.0);
  if (omega <= lo) return 0.0;
  if (omega <= hi) {
    const double u = (a + 1.0) * omega - 2.0;
    return u * u / (4.0 * (a * a - 1.0));
  }
  return omega - 1.0;
}

double scad_penalty_via_conjugate(double t, double gamma, double a) {
  require_a(a);
  if (!(gamma > 0.0)) throw std::invalid_argument("penalty: gamma must be positive");
  const double lambda = (a + 1.0) * gamma * gamma / 2.0;
  const double rho = 2.0 / ((a + 1.0) * gamma);
  const double r = rho * std::abs(t);
  return lambda * (r - psi_conjugate(r, a));
}

double w_update(double beta_i, double rho, double a) {
  require_a(a);
  if (!(rho > 0.0)) throw std::invalid_argument("w_update: rho must be positive");
  const double raw = ((a + 1.0) * rho * std::abs(beta_i) - 2.0) / (2.0 * (a - 1.0));
  return std::min(1.0, std::max(raw, 0.0));
}

Vector w_update(const Vector& beta, double rho, double a) {
  Vector w(beta.size());
  for (Index i = 0; i < beta.size(); ++i) w(i) = w_update(beta(i), rho, a);
  return w;
}

double rho_schedule(int k, const Vector& beta, double rho_prev, double cap) {
  if (k < 1) throw std::invalid_argument("rho_schedule: stage index starts at 1");
  const double bmax = beta.size() ? beta.lpNorm<Eigen::Infinity>() : 0.0;
  if (bmax == 0.0) return rho_prev;
  if (k == 1) return std::max(1.0, 5.0 / (3.0 * bmax));
  if (k <= 3) return std::min(2.0 * rho_prev, cap / bmax);
  return rho_prev;
}

}  // namespace caznrls
