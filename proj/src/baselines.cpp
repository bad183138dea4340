#include "caznrls/baselines.hpp"

#include "caznrls/l1_ball.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace caznrls {

void AdmmParams::validate() const {
  const double golden = (std::sqrt(5.0) + 1.0) / 2.0;
  if (!(mu > 0.0)) throw std::invalid_argument("ADMM: mu must be positive");
  if (!(tau_step > 1.0 && tau_step < golden))
    throw std::invalid_argument("ADMM: step length must lie in (1, (sqrt(5)+1)/2)");
  if (!(tol_pinf > 0.0) || !(tol_dinf > 0.0) || !(tol_gap_scaled > 0.0) || !(gap_weight >= 0.0))
    throw std::invalid_argument("ADMM: tolerances must be positive");
  if (max_iters < 1 || adapt_every < 1 || !(adapt_ratio > 1.0))
    throw std::invalid_argument("ADMM: iteration controls out of range");
}

MaxNormProjection nearest_pd_maxnorm(const Matrix& sigma_hat, double eps_hat,
                                     const AdmmParams& params,
                                     const std::optional<AdmmState>& warm,
                                     const AdmmObserver& observer) {
  params.validate();
  if (!(eps_hat > 0.0)) throw std::invalid_argument("nearest_pd_maxnorm: eps_hat must be positive");
  if (!is_exactly_symmetric(sigma_hat))
    throw std::invalid_argument("nearest_pd_maxnorm: input must be exactly symmetric");
  const Index p = sigma_hat.rows();

  Matrix shifted = sigma_hat;
  shifted.diagonal().array() -= eps_hat;
  const double scale = 1.0 + sigma_hat.norm();

  AdmmState st;
  if (warm && warm->b.rows() == p && warm->gamma.rows() == p) {
    st = *warm;
  } else {
    st.w = sigma_hat;
    st.b = Matrix::Zero(p, p);
    st.gamma = Matrix::Zero(p, p);
    st.mu = params.mu;
  }

  MaxNormProjection out;
  AdmmDiagnostics& diag = out.diagnostics;
  Matrix g(p, p), proj(p, p), b_next(p, p), gamma_next(p, p);
  const double tau = params.tau_step;

  for (int k = 0; k < params.max_iters; ++k) {
    const double mu = st.mu;
    // W-step: shifted PSD projection.
    const Matrix m = st.b - st.gamma / mu + shifted;
    const SymEigen eig = sym_eig(symmetrize(m));
    st.w = psd_part(eig);
    st.w.diagonal().array() += eps_hat;

    // B-step via prox_f(G) = G - Pi_{ball/mu}(G).
    g = st.w + st.gamma / mu - sigma_hat;
    proj = g;
    l1_ball_project_inplace(std::span<double>(proj.data(), static_cast<std::size_t>(proj.size())),
                            1.0 / mu);
    b_next = g - proj;

    gamma_next = st.gamma + tau * mu * (st.w - b_next - sigma_hat);

    const double eps_pinf =
        (mu * (b_next - st.b) + (1.0 / tau - 1.0) * (gamma_next - st.gamma)).norm() / scale;
    const double eps_dinf = (gamma_next - st.gamma).norm() / (tau * mu * scale);
    const double primal = max_abs(b_next);
    const double dual_term = (gamma_next.array() * shifted.array()).sum();
    const double eps_gap =
        std::abs(primal + dual_term) / std::max(1.0, 0.5 * (std::abs(primal) + std::abs(dual_term)));

    if (observer) {
      AdmmIterate it;
      it.k = k;
      it.w = &st.w;
      it.b = &b_next;
      it.g = &g;
      it.g_projected = &proj;
      it.eps_pinf = eps_pinf;
      it.eps_dinf = eps_dinf;
      it.eps_gap = eps_gap;
      it.mu = mu;
      observer(it);
    }

    st.b.swap(b_next);
    st.gamma.swap(gamma_next);
    diag.iterations = k + 1;
    diag.eps_pinf = eps_pinf;
    diag.eps_dinf = eps_dinf;
    diag.eps_gap = eps_gap;
    diag.objective = primal;

    if (eps_pinf <= params.tol_pinf && eps_dinf <= params.tol_dinf &&
        params.gap_weight * eps_gap <= params.tol_gap_scaled) {
      diag.converged = true;
      break;
    }
    if ((k + 1) % params.adapt_every == 0) {
      // eps_dinf measures the constraint violation W - B - sigma_hat.
      if (eps_dinf > params.adapt_ratio * eps_pinf)
        st.mu *= 2.0;
      else if (eps_pinf > params.adapt_ratio * eps_dinf)
        st.mu /= 2.0;
    }
  }
  diag.final_mu = st.mu;
  out.sigma_bar = st.w;
  out.state = std::move(st);
  return out;
}

CocoPair coco_calibrate(const SurrogatePair& pair, double eps_hat, const AdmmParams& params,
                        const std::optional<AdmmState>& warm) {
  return coco_from_projection(pair, nearest_pd_maxnorm(pair.sigma_hat, eps_hat, params, warm));
}

CocoPair coco_from_projection(const SurrogatePair& pair, MaxNormProjection mp) {
  const Eigen::LLT<Matrix> llt(mp.sigma_bar);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("coco_calibrate: Cholesky factorization failed (ADMM iterations=" +
                             std::to_string(mp.diagnostics.iterations) + ", converged=" +
                             (mp.diagnostics.converged ? "true" : "false") + ")");
  const double sqrt_n = std::sqrt(static_cast<double>(pair.n));
  const Matrix lower = llt.matrixL();
  CocoPair out;
  out.z_bar = sqrt_n * lower.transpose();
  out.y_bar = sqrt_n * lower.triangularView<Eigen::Lower>().solve(pair.xi_hat);
  out.sigma_bar = std::move(mp.sigma_bar);
  out.admm = mp.diagnostics;
  out.n = pair.n;
  return out;
}

LassoFit cocolasso_solve(const CocoPair& coco, double lambda, const AlmParams& alm,
                         const std::optional<WeightedLassoSolution>& warm) {
  if (!(lambda > 0.0)) throw std::invalid_argument("cocolasso: lambda must be positive");
  const Index p = coco.z_bar.cols();
  WeightedLassoProblem prob{coco.z_bar, coco.y_bar,
                            Vector::Constant(p, static_cast<double>(coco.n) * lambda)};
  const WeightedLassoSolution sol = solve(prob, alm, warm);
  return {sol.beta, sol.converged, sol.kkt_residual};
}

Vector cocolasso_fit(const SurrogatePair& pair, double eps_hat, const AdmmParams& admm,
                     double lambda, const AlmParams& alm) {
  return cocolasso_solve(coco_calibrate(pair, eps_hat, admm), lambda, alm).beta;
}

void NclParams::validate() const {
  if (!(radius >= 0.0)) throw std::invalid_argument("NCL: radius must be nonnegative");
  if (max_iters < 1 || !(tol > 0.0)) throw std::invalid_argument("NCL: iteration controls out of range");
}

SpectralEstimate spectral_norm_estimate(const Matrix& s, int max_iters, double tol) {
  const Index p = s.rows();
  SpectralEstimate out;
  if (p == 0) return out;
  // Deterministic start with all components present.
  Vector v = Vector::LinSpaced(p, 1.0, 2.0).normalized();
  double prev = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    const Vector u = s * (s * v);
    const double nrm = u.norm();
    if (nrm == 0.0) {
      out.value = 0.0;
      out.converged = true;
      return out;
    }
    v = u / nrm;
    const double est = std::sqrt(nrm);
    if (std::abs(est - prev) <= tol * std::max(1.0, est)) {
      out.value = est;
      out.converged = true;
      return out;
    }
    prev = est;
  }
  out.value = prev;
  return out;
}

NclResult ncl_fit(const SurrogatePair& pair, const NclParams& params) {
  params.validate();
  const Matrix& s = pair.sigma_hat;
  const Vector& xi = pair.xi_hat;
  const Index p = xi.size();
  const auto objective = [&](const Vector& b) { return 0.5 * b.dot(s * b) - xi.dot(b); };

  NclResult out;
  out.beta = Vector::Zero(p);
  if (params.radius == 0.0) {
    out.converged = true;
    return out;
  }
  const SpectralEstimate spec = spectral_norm_estimate(s);
  out.spectral_converged = spec.converged;
  const double lipschitz = std::max(spec.value, std::numeric_limits<double>::min());
  out.step = 1.0 / lipschitz;

  double f = objective(out.beta);
  double local_l = lipschitz;
  for (int it = 0; it < params.max_iters; ++it) {
    const Vector grad = s * out.beta - xi;
    Vector next;
    double f_next = 0.0;
    if (params.step_rule == NclStepRule::fixed_inverse_spectral) {
      next = l1_ball_project(out.beta - out.step * grad, params.radius);
      f_next = objective(next);
    } else {
      local_l = std::max(local_l / 2.0, lipschitz * 1e-3);
      for (int m = 0; m < 60; ++m) {
        next = l1_ball_project(out.beta - grad / local_l, params.radius);
        f_next = objective(next);
        const Vector d = next - out.beta;
        if (f_next <= f + grad.dot(d) + 0.5 * local_l * d.squaredNorm()) break;
        local_l *= 2.0;
      }
      out.step = 1.0 / local_l;
    }
    if (f_next > f) ++out.objective_increases;
    out.beta = std::move(next);
    out.iterations = it + 1;
    const double change = std::abs(f_next - f) / std::max(1.0, std::abs(f_next));
    f = f_next;
    if (change <= params.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace caznrls
