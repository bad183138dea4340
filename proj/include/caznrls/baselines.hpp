#pragma once

#include "caznrls/linalg.hpp"
#include "caznrls/surrogate.hpp"
#include "caznrls/wls_solver.hpp"

#include <functional>
#include <optional>

namespace caznrls {

// ---------------------------------------------------------------------------
// Max-norm nearest positive-definite matrix (CoCoLasso calibration)
//
//   min ||B||_max  s.t.  W - B = sigma_hat,  W >= eps_hat I
//
// solved by ADMM with step length tau in (1, (1 + sqrt 5) / 2). The B-step is
// computed through the Moreau decomposition with a projection onto the
// elementwise l1 ball of radius 1 / mu.
// ---------------------------------------------------------------------------

struct AdmmParams {
  double mu = 1.0;          // initial penalty, adjusted every adapt_every iterations
  double tau_step = 1.618;
  double tol_pinf = 1e-4;
  double tol_dinf = 1e-4;
  double tol_gap_scaled = 1e-4;
  double gap_weight = 1e-3;  // the gap enters the test as gap_weight * eps_gap
  int max_iters = 5000;
  int adapt_every = 50;
  double adapt_ratio = 10.0;

  void validate() const;
};

struct AdmmState {
  Matrix w;
  Matrix b;
  Matrix gamma;
  double mu = 1.0;
};

struct AdmmDiagnostics {
  int iterations = 0;
  bool converged = false;
  double eps_pinf = 0.0;
  double eps_dinf = 0.0;
  double eps_gap = 0.0;
  double objective = 0.0;  // ||B||_max at the last iterate
  double final_mu = 0.0;
};

// Snapshot passed to an optional per-iteration observer.
struct AdmmIterate {
  int k = 0;
  const Matrix* w = nullptr;
  const Matrix* b = nullptr;
  const Matrix* g = nullptr;           // W + Gamma / mu - sigma_hat
  const Matrix* g_projected = nullptr;  // projection of g onto the 1/mu l1 ball
  double eps_pinf = 0.0;
  double eps_dinf = 0.0;
  double eps_gap = 0.0;
  double mu = 0.0;
};

using AdmmObserver = std::function<void(const AdmmIterate&)>;

struct MaxNormProjection {
  Matrix sigma_bar;
  AdmmState state;
  AdmmDiagnostics diagnostics;
};

MaxNormProjection nearest_pd_maxnorm(const Matrix& sigma_hat, double eps_hat,
                                     const AdmmParams& params,
                                     const std::optional<AdmmState>& warm = std::nullopt,
                                     const AdmmObserver& observer = {});

// ---------------------------------------------------------------------------
// CoCoLasso
// ---------------------------------------------------------------------------

// Cholesky-calibrated pair: sigma_bar = L L^T, z_bar = sqrt(n) L^T and
// z_bar^T y_bar = n xi_hat.
struct CocoPair {
  Matrix z_bar;
  Vector y_bar;
  Matrix sigma_bar;
  AdmmDiagnostics admm;
  Index n = 0;
};

CocoPair coco_calibrate(const SurrogatePair& pair, double eps_hat, const AdmmParams& params,
                        const std::optional<AdmmState>& warm = std::nullopt);

// Cholesky step on an already computed max-norm projection.
CocoPair coco_from_projection(const SurrogatePair& pair, MaxNormProjection mp);

struct LassoFit {
  Vector beta;
  bool converged = false;
  double kkt_residual = 0.0;
};

// Uniform-weight lasso on the calibrated pair with omega = n lambda.
LassoFit cocolasso_solve(const CocoPair& coco, double lambda, const AlmParams& alm = {},
                         const std::optional<WeightedLassoSolution>& warm = std::nullopt);

Vector cocolasso_fit(const SurrogatePair& pair, double eps_hat, const AdmmParams& admm,
                     double lambda, const AlmParams& alm = {});

// ---------------------------------------------------------------------------
// Nonconvex lasso: projected gradient on 1/2 b^T S b - xi^T b over ||b||_1 <= R0
// ---------------------------------------------------------------------------

enum class NclStepRule { fixed_inverse_spectral, backtracking };

struct NclParams {
  double radius = 1.0;
  NclStepRule step_rule = NclStepRule::fixed_inverse_spectral;
  int max_iters = 2000;
  double tol = 1e-9;

  void validate() const;
};

struct NclResult {
  Vector beta;
  int iterations = 0;
  bool converged = false;
  double step = 0.0;
  bool spectral_converged = false;
  int objective_increases = 0;  // logged, not an error for indefinite S
};

// Largest |eigenvalue| of a symmetric matrix via power iteration on S^2.
struct SpectralEstimate {
  double value = 0.0;
  bool converged = false;
};
SpectralEstimate spectral_norm_estimate(const Matrix& s, int max_iters = 1000,
                                        double tol = 1e-10);

NclResult ncl_fit(const SurrogatePair& pair, const NclParams& params);

}  // namespace caznrls
