#include "caznrls/gep_msgra.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace caznrls {

void GepConfig::validate(Index p) const {
  if (!(a > 1.0)) throw std::invalid_argument("GEP config: a must exceed 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("GEP config: lambda must be positive");
  if (k_max < 1) throw std::invalid_argument("GEP config: k_max must be >= 1");
  if (!(rho0 > 0.0) || !(rho_cap > 0.0))
    throw std::invalid_argument("GEP config: rho0 and rho_cap must be positive");
  if (stop_nnz_delta < 0 || !(stop_loss_delta >= 0.0) || !(nnz_threshold >= 0.0))
    throw std::invalid_argument("GEP config: stopping thresholds must be nonnegative");
  if (w0) {
    if (w0->size() != p) throw std::invalid_argument("GEP config: w0 must have length p");
    if ((w0->array() < 0.0).any() || (w0->array() > 0.5).any())
      throw std::invalid_argument("GEP config: w0 must lie in [0, 1/2]");
  }
  alm.validate();
}

Index count_nonzero(const Vector& beta, double threshold) {
  return (beta.array().abs() > threshold).count();
}

namespace {

bool stable(const std::vector<StageRecord>& it, const GepConfig& cfg) {
  const std::size_t k = it.size();
  if (k < 4) return false;
  for (std::size_t j = 0; j < 3; ++j) {
    const Index a = it[k - 1 - j].nnz;
    const Index b = it[k - 2 - j].nnz;
    if (std::llabs(static_cast<long long>(a - b)) > cfg.stop_nnz_delta) return false;
  }
  return std::abs(it[k - 1].loss - it[k - 2].loss) <= cfg.stop_loss_delta;
}

}  // namespace

FitResult fit(const Matrix& design, const Vector& response, Index n, const GepConfig& cfg) {
  const Index p = design.cols();
  cfg.validate(p);
  if (n < 1) throw std::invalid_argument("fit: n must be >= 1");
  const double dn = static_cast<double>(n);

  WeightedLassoProblem prob{design, response, Vector(p)};
  Vector w = cfg.w0 ? *cfg.w0 : Vector::Zero(p);
  double rho = cfg.rho0;

  FitResult out;
  std::optional<WeightedLassoSolution> warm;
  for (int k = 1;; ++k) {
    prob.omega = dn * cfg.lambda * (Vector::Ones(p) - w);
    WeightedLassoSolution sol = solve(prob, cfg.alm, warm);

    rho = rho_schedule(k, sol.beta, rho, cfg.rho_cap);
    w = w_update(sol.beta, rho, cfg.a);

    StageRecord rec;
    rec.beta = sol.beta;
    rec.w = w;
    rec.rho = rho;
    rec.loss = (prob.z * sol.beta - prob.y).squaredNorm() / (2.0 * dn);
    rec.nnz = count_nonzero(sol.beta, cfg.nnz_threshold);
    rec.inner_converged = sol.converged;
    rec.inner_kkt = sol.kkt_residual;
    out.all_inner_converged = out.all_inner_converged && sol.converged;
    out.iterates.push_back(std::move(rec));
    warm = std::move(sol);

    if (stable(out.iterates, cfg)) {
      out.stopped_by = StopReason::stability;
      break;
    }
    if (k >= cfg.k_max) {
      out.stopped_by = StopReason::k_max;
      break;
    }
  }

  out.stages_run = static_cast<int>(out.iterates.size());
  out.beta_final = out.iterates.back().beta;
  for (Index i = 0; i < p; ++i)
    if (std::abs(out.beta_final(i)) > cfg.nnz_threshold) out.support.push_back(i);
  return out;
}

FitResult fit(const CalibratedPair& cal, const GepConfig& cfg) {
  return fit(cal.z_tilde, cal.y_tilde, cal.n, cfg);
}

}  // namespace caznrls
