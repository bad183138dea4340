#include "caznrls/wls_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace caznrls {

void WeightedLassoProblem::validate() const {
  if (z.rows() != y.size())
    throw std::invalid_argument("weighted lasso: design rows must match response length");
  if (omega.size() != z.cols())
    throw std::invalid_argument("weighted lasso: one weight per column is required");
  if ((omega.array() < 0.0).any() || !omega.allFinite())
    throw std::invalid_argument("weighted lasso: weights must be finite and nonnegative");
  if (!z.allFinite() || !y.allFinite())
    throw std::invalid_argument("weighted lasso: non-finite data");
}

void AlmParams::validate() const {
  const auto in_open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!(mu0 > 0.0) || !(mu_growth >= 1.0) || !(mu_max >= mu0) || !(tol > 0.0) ||
      max_alm_iters < 1)
    throw std::invalid_argument("ALM parameters out of range");
  if (!in_open_unit(newton.theta) || !in_open_unit(newton.varsigma) ||
      !in_open_unit(newton.delta) || !(newton.rho_ls > 0.0 && newton.rho_ls < 0.5) ||
      newton.max_newton_iters < 1 || newton.max_cg_iters < 1)
    throw std::invalid_argument("semismooth Newton parameters out of range");
}

BoxProjection box_project(const Vector& h, const Vector& omega) {
  const Index p = h.size();
  BoxProjection out{Vector(p), Vector(p)};
  for (Index i = 0; i < p; ++i) {
    const double w = omega(i);
    out.projected(i) = std::clamp(h(i), -w, w);
    out.jacobian_diag(i) = std::abs(h(i)) < w ? 1.0 : 0.0;
  }
  return out;
}

PhiEval phi_value_grad(const Vector& zeta, const Vector& multiplier, double mu,
                       const WeightedLassoProblem& prob) {
  PhiEval out;
  out.h = prob.z.transpose() * zeta + multiplier / mu;
  const Vector excess = out.h - out.h.cwiseMax(-prob.omega).cwiseMin(prob.omega);
  out.value = 0.5 * mu * excess.squaredNorm() + 0.5 * zeta.squaredNorm() +
              prob.y.dot(zeta);
  out.grad = prob.y + zeta + mu * (prob.z * excess);
  return out;
}

namespace {

// Solves (I + mu Zj Zj^T) d = rhs by CG; returns iterations used.
int cg_solve(const Matrix& zj, double mu, const Vector& rhs, double tol, int max_iters,
             Vector& d) {
  const auto apply = [&](const Vector& v) -> Vector {
    if (zj.cols() == 0) return v;
    return v + mu * (zj * (zj.transpose() * v));
  };
  d.setZero(rhs.size());
  Vector r = rhs;
  double rr = r.squaredNorm();
  if (std::sqrt(rr) <= tol) return 0;
  Vector dir = r;
  int it = 0;
  while (it < max_iters) {
    ++it;
    const Vector q = apply(dir);
    const double denom = dir.dot(q);
    if (!(denom > 0.0)) break;
    const double step = rr / denom;
    d += step * dir;
    r -= step * q;
    const double rr_new = r.squaredNorm();
    if (std::sqrt(rr_new) <= tol) break;
    dir = r + (rr_new / rr) * dir;
    rr = rr_new;
  }
  return it;
}

}  // namespace

NewtonResult semismooth_newton(const WeightedLassoProblem& prob,
                               const Vector& multiplier, double mu,
                               const Vector& zeta_start, const NewtonParams& params,
                               double stop_norm) {
  if (!(stop_norm > 0.0)) throw std::invalid_argument("semismooth_newton: stop_norm must be positive");
  if (!(mu > 0.0)) throw std::invalid_argument("semismooth_newton: mu must be positive");
  const Index p = prob.p();
  NewtonResult out;
  out.zeta = zeta_start;
  PhiEval cur = phi_value_grad(out.zeta, multiplier, mu, prob);
  out.phi_trace.push_back(cur.value);

  Matrix zj;
  std::vector<Index> cols;
  cols.reserve(static_cast<std::size_t>(p));
  for (;;) {
    const double gnorm = cur.grad.norm();
    out.grad_norm = gnorm;
    if (gnorm <= stop_norm) {
      out.converged = true;
      break;
    }
    if (out.iterations >= params.max_newton_iters) break;
    ++out.iterations;

    // Generalized Hessian V = I + mu Z (I - W) Z^T; (I - W) selects |h_i| >= omega_i.
    cols.clear();
    for (Index i = 0; i < p; ++i)
      if (std::abs(cur.h(i)) >= prob.omega(i)) cols.push_back(i);
    zj.resize(prob.z.rows(), static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
      zj.col(static_cast<Index>(c)) = prob.z.col(cols[c]);

    Vector d;
    const double cg_tol =
        std::min(params.theta, std::pow(gnorm, 1.0 + params.varsigma));
    out.cg_iterations += cg_solve(zj, mu, -cur.grad, cg_tol, params.max_cg_iters, d);

    double slope = cur.grad.dot(d);
    if (!(slope < 0.0) || !d.allFinite()) {
      d = -cur.grad;
      slope = -gnorm * gnorm;
      ++out.steepest_descent_steps;
    }

    double step = 1.0;
    PhiEval trial;
    // Below this size the Armijo decrease is lost in the rounding of Phi, so
    // the unit step is judged by the gradient norm instead.
    const double resolution =
        64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(cur.value));
    if (params.rho_ls * -slope <= resolution) {
      trial = phi_value_grad(out.zeta + d, multiplier, mu, prob);
      if (!(trial.grad.norm() < gnorm)) break;
    } else {
      bool accepted = false;
      for (int m = 0; m < 60; ++m) {
        trial = phi_value_grad(out.zeta + step * d, multiplier, mu, prob);
        if (trial.value <= cur.value + params.rho_ls * step * slope) {
          accepted = true;
          break;
        }
        step *= params.delta;
        if (params.rho_ls * step * -slope <= resolution) break;
      }
      if (!accepted) {
        trial = phi_value_grad(out.zeta + d, multiplier, mu, prob);
        if (trial.grad.norm() < gnorm && trial.value <= cur.value + resolution) {
          step = 1.0;
        } else {
          break;
        }
      }
    }
    out.zeta += step * d;
    cur = std::move(trial);
    out.phi_trace.push_back(cur.value);
  }
  return out;
}

double primal_objective(const WeightedLassoProblem& prob, const Vector& beta) {
  return 0.5 * (prob.z * beta - prob.y).squaredNorm() +
         prob.omega.dot(beta.cwiseAbs());
}

double dual_objective(const WeightedLassoProblem& prob, const Vector& zeta) {
  return 0.5 * zeta.squaredNorm() + prob.y.dot(zeta);
}

double primal_kkt_residual(const WeightedLassoProblem& prob, const Vector& beta) {
  const Vector grad = prob.z.transpose() * (prob.z * beta - prob.y);
  const Vector v = beta - grad;
  Vector prox(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i)) - prob.omega(i);
    prox(i) = a > 0.0 ? std::copysign(a, v(i)) : 0.0;
  }
  return (beta - prox).lpNorm<Eigen::Infinity>();
}

WeightedLassoSolution solve(const WeightedLassoProblem& prob, const AlmParams& params,
                            const std::optional<WeightedLassoSolution>& warm) {
  prob.validate();
  params.validate();
  const Index p = prob.p();
  const double ynorm1 = 1.0 + prob.y.norm();

  Vector multiplier = Vector::Zero(p);
  Vector zeta = Vector::Zero(prob.z.rows());
  if (warm && warm->beta.size() == p && warm->zeta.size() == prob.z.rows()) {
    multiplier = -warm->beta;
    zeta = warm->zeta;
  }
  double mu = params.mu0;

  WeightedLassoSolution out;
  double eps_dinf = 1.0;
  double eps_gap = 1.0;
  double prev_dinf = std::numeric_limits<double>::infinity();
  double delta_j = 1.0;

  for (int j = 0; j < params.max_alm_iters; ++j) {
    const double target = delta_j * std::min(0.1, std::max(eps_dinf, eps_gap));
    const double stop_norm = ynorm1 * std::max(target, 0.1 * params.tol);
    NewtonResult nr = semismooth_newton(prob, multiplier, mu, zeta, params.newton, stop_norm);
    zeta = std::move(nr.zeta);
    out.newton_iters_total += nr.iterations;
    out.cg_iters_total += nr.cg_iterations;

    const Vector zt_zeta = prob.z.transpose() * zeta;
    const Vector h = zt_zeta + multiplier / mu;
    const Vector eta = h.cwiseMax(-prob.omega).cwiseMin(prob.omega);
    const Vector next = multiplier + mu * (zt_zeta - eta);

    const double eps_pinf = nr.grad_norm / ynorm1;
    eps_dinf = (next - multiplier).norm() / (mu * ynorm1);
    const Vector beta = -next;
    const double primal = primal_objective(prob, beta);
    const double dual = dual_objective(prob, zeta);
    eps_gap = std::abs(primal + dual) / (1.0 + std::abs(primal));
    multiplier = next;

    out.alm_iters = j + 1;
    out.eps_pinf = eps_pinf;
    out.eps_dinf = eps_dinf;
    out.eps_gap = eps_gap;
    out.kkt_residual = std::max({eps_pinf, eps_dinf, eps_gap});
    out.eta = eta;
    out.mu = mu;
    if (out.kkt_residual <= params.tol) {
      out.converged = true;
      break;
    }
    if (eps_dinf > 0.6 * prev_dinf) mu = std::min(mu * params.mu_growth, params.mu_max);
    prev_dinf = eps_dinf;
    delta_j *= 0.5;
  }
  out.beta = -multiplier;
  out.zeta = std::move(zeta);
  return out;
}

}  // namespace caznrls
