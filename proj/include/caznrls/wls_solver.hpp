#pragma once

#include "caznrls/linalg.hpp"

#include <optional>
#include <vector>

namespace caznrls {

// min_beta 1/2 ||Z beta - y||^2 + sum_i omega_i |beta_i|
struct WeightedLassoProblem {
  Matrix z;
  Vector y;
  Vector omega;

  Index p() const { return z.cols(); }
  void validate() const;
};

struct NewtonParams {
  double theta = 0.1;     // CG residual cap
  double varsigma = 0.5;  // CG residual exponent: ||g||^(1 + varsigma)
  double delta = 0.5;     // backtracking factor
  double rho_ls = 0.25;   // Armijo constant, in (0, 1/2)
  int max_newton_iters = 50;
  int max_cg_iters = 200;
};

struct AlmParams {
  double mu0 = 1.0;
  double mu_growth = 2.5;
  double mu_max = 1e8;
  double tol = 1e-8;
  int max_alm_iters = 300;
  NewtonParams newton;

  void validate() const;
};

// beta is the primal coefficient vector. The ALM works with the multiplier
// of the dual constraint Z^T zeta - eta = 0, which converges to -beta.
struct WeightedLassoSolution {
  Vector beta;
  Vector zeta;
  Vector eta;
  double eps_pinf = 0.0;
  double eps_dinf = 0.0;
  double eps_gap = 0.0;
  double kkt_residual = 0.0;  // max(eps_pinf, eps_dinf, eps_gap)
  double mu = 0.0;            // final penalty
  int alm_iters = 0;
  int newton_iters_total = 0;
  int cg_iters_total = 0;
  bool converged = false;
};

struct BoxProjection {
  Vector projected;
  Vector jacobian_diag;  // 1 strictly inside the box, 0 on or outside its boundary
};

BoxProjection box_project(const Vector& h, const Vector& omega);

struct PhiEval {
  double value = 0.0;
  Vector grad;
  Vector h;
};

// Phi(zeta) = mu/2 ||Pi(h) - h||^2 + 1/2 ||zeta||^2 + <y, zeta>,
// h = Z^T zeta + multiplier / mu.
PhiEval phi_value_grad(const Vector& zeta, const Vector& multiplier, double mu,
                       const WeightedLassoProblem& prob);

struct NewtonResult {
  Vector zeta;
  double grad_norm = 0.0;
  int iterations = 0;
  int cg_iterations = 0;
  int steepest_descent_steps = 0;
  bool converged = false;
  std::vector<double> phi_trace;  // Phi at the start and after each accepted step
};

// Semismooth Newton-CG on Phi with Armijo backtracking. Stops once
// ||grad Phi|| <= stop_norm or the iteration budget runs out.
NewtonResult semismooth_newton(const WeightedLassoProblem& prob,
                               const Vector& multiplier, double mu,
                               const Vector& zeta_start, const NewtonParams& params,
                               double stop_norm);

// Inexact ALM on the dual with semismooth Newton-CG subproblem solves.
WeightedLassoSolution solve(const WeightedLassoProblem& prob, const AlmParams& params,
                            const std::optional<WeightedLassoSolution>& warm = std::nullopt);

// 1/2 ||Z beta - y||^2 + sum omega_i |beta_i|
double primal_objective(const WeightedLassoProblem& prob, const Vector& beta);

// 1/2 ||zeta||^2 + <y, zeta>
double dual_objective(const WeightedLassoProblem& prob, const Vector& zeta);

// Natural residual ||beta - prox(beta - grad)||_inf of the primal problem,
// a solver-independent optimality measure.
double primal_kkt_residual(const WeightedLassoProblem& prob, const Vector& beta);

}  // namespace caznrls
