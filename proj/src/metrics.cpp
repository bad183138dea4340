#include "caznrls/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace caznrls {

namespace {

int thresholded_sign(double x, double threshold) {
  if (std::abs(x) <= threshold) return 0;
  return x > 0.0 ? 1 : -1;
}

}  // namespace

RecoveryMetrics metrics(const Vector& beta_f, const Vector& beta_star, double threshold) {
  if (beta_f.size() != beta_star.size())
    throw std::invalid_argument("metrics: coefficient vectors differ in length");
  const double star_norm = beta_star.norm();
  if (!(star_norm > 0.0)) throw std::invalid_argument("metrics: beta_star must be nonzero");
  RecoveryMetrics m;
  m.rmse_rel = (beta_f - beta_star).norm() / star_norm;
  for (Index i = 0; i < beta_f.size(); ++i) {
    const int sf = thresholded_sign(beta_f(i), threshold);
    if (sf != 0) ++m.nnz;
    const int ss = thresholded_sign(beta_star(i), threshold);
    if (ss != 0 && sf == ss) ++m.nc;
  }
  m.nic = m.nnz - m.nc;
  return m;
}

}  // namespace caznrls
