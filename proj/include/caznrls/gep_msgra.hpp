#pragma once

#include "caznrls/calibration.hpp"
#include "caznrls/linalg.hpp"
#include "caznrls/penalty.hpp"
#include "caznrls/wls_solver.hpp"

#include <optional>
#include <vector>

namespace caznrls {

struct GepConfig {
  double a = 6.0;
  double lambda = 0.1;
  std::optional<Vector> w0;  // empty means the zero vector
  int k_max = 4;
  double rho0 = 1.0;
  double rho_cap = 1e8;
  int stop_nnz_delta = 5;
  double stop_loss_delta = 0.1;
  double nnz_threshold = 1e-8;
  AlmParams alm;

  void validate(Index p) const;
};

struct StageRecord {
  Vector beta;
  Vector w;
  double rho = 0.0;
  double loss = 0.0;  // ||Z beta - y||^2 / (2n)
  Index nnz = 0;
  bool inner_converged = false;
  double inner_kkt = 0.0;
};

enum class StopReason { stability, k_max };

struct FitResult {
  Vector beta_final;
  std::vector<Index> support;
  std::vector<StageRecord> iterates;
  int stages_run = 0;
  StopReason stopped_by = StopReason::k_max;
  bool all_inner_converged = true;
};

Index count_nonzero(const Vector& beta, double threshold);

// Multi-stage convex relaxation of the calibrated zero-norm problem.
// Stage k solves the weighted lasso with omega = n lambda (1 - w^{k-1}),
// warm-started from stage k-1, then updates rho_k and w^k.
FitResult fit(const CalibratedPair& cal, const GepConfig& cfg);

// Same loop on an arbitrary (design, response, n) triple.
FitResult fit(const Matrix& design, const Vector& response, Index n, const GepConfig& cfg);

}  // namespace caznrls
