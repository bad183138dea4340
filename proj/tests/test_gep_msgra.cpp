#include "caznrls/calibration.hpp"
#include "caznrls/gep_msgra.hpp"
#include "caznrls/surrogate.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace caznrls;

namespace {

struct CleanInstance {
  Matrix x;
  Vector y;
  Vector beta_star;
  CalibratedPair cal;
};

// Gaussian design, no corruption, s = 3 with |beta*_i| >= 2, n >> s ln p.
CleanInstance clean_instance(Index p, Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CleanInstance c;
  c.x = oracle::random_matrix(n, p, rng);
  c.beta_star = Vector::Zero(p);
  c.beta_star(1) = 2.5;
  c.beta_star(p / 2) = -2.0;
  c.beta_star(p - 2) = 3.0;
  c.y = c.x * c.beta_star + 0.3 * oracle::random_vector(n, rng);
  const SurrogatePair pair = additive_surrogate(c.x, c.y, Matrix::Zero(p, p));
  c.cal = calibrate(pair);
  return c;
}

}  // namespace

TEST(GepFit, RecoversSignsOnCleanInstance) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const CleanInstance c = clean_instance(60, 200, seed);
    GepConfig cfg;
    cfg.lambda = 0.1 * (c.x.transpose() * c.y).lpNorm<Eigen::Infinity>() / 200.0;
    const FitResult fr = fit(c.cal, cfg);
    for (Index i = 0; i < 60; ++i) {
      const double s = c.beta_star(i) == 0.0 ? 0.0 : std::copysign(1.0, c.beta_star(i));
      const double f =
          std::abs(fr.beta_final(i)) <= 1e-8 ? 0.0 : std::copysign(1.0, fr.beta_final(i));
      EXPECT_EQ(s, f) << "seed " << seed << " index " << i;
    }
  }
}

TEST(GepFit, LargeLambdaGivesZero) {
  const CleanInstance c = clean_instance(30, 80, 4);
  GepConfig cfg;
  cfg.lambda = 1.01 * (c.cal.z_tilde.transpose() * c.cal.y_tilde).lpNorm<Eigen::Infinity>() / 80.0;
  const FitResult fr = fit(c.cal, cfg);
  EXPECT_LE(fr.beta_final.lpNorm<Eigen::Infinity>(), 1e-9);
  EXPECT_TRUE(fr.support.empty());
}

TEST(GepFit, FirstStageIsPlainLasso) {
  const CleanInstance c = clean_instance(40, 100, 5);
  GepConfig cfg;
  cfg.lambda = 0.05;
  cfg.k_max = 1;
  const FitResult fr = fit(c.cal, cfg);
  ASSERT_EQ(fr.iterates.size(), 1U);
  const WeightedLassoProblem prob{c.cal.z_tilde, c.cal.y_tilde, Vector::Constant(40, 100.0 * 0.05)};
  const WeightedLassoSolution sol = solve(prob, cfg.alm);
  EXPECT_LE((fr.iterates[0].beta - sol.beta).lpNorm<Eigen::Infinity>(), 1e-8);
  const oracle::ProxGradResult ref = oracle::prox_grad_lasso(prob.z, prob.y, prob.omega);
  EXPECT_LE((fr.iterates[0].beta - ref.beta).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(GepFit, StageRecordsAreConsistent) {
  const CleanInstance c = clean_instance(50, 120, 6);
  GepConfig cfg;
  cfg.lambda = 0.05;
  const FitResult fr = fit(c.cal, cfg);
  ASSERT_FALSE(fr.iterates.empty());
  EXPECT_EQ(fr.stages_run, static_cast<int>(fr.iterates.size()));
  EXPECT_LE(fr.stages_run, cfg.k_max);
  double prev_rho = cfg.rho0;
  for (std::size_t k = 0; k < fr.iterates.size(); ++k) {
    const StageRecord& r = fr.iterates[k];
    EXPECT_GE(r.rho, prev_rho);
    if (k >= 3) {
      EXPECT_EQ(r.rho, prev_rho);
    }
    prev_rho = r.rho;
    EXPECT_EQ(r.nnz, count_nonzero(r.beta, cfg.nnz_threshold));
    EXPECT_LE((r.w - w_update(r.beta, r.rho, cfg.a)).cwiseAbs().maxCoeff(), 0.0);
    const double loss =
        (c.cal.z_tilde * r.beta - c.cal.y_tilde).squaredNorm() / (2.0 * 120.0);
    EXPECT_NEAR(r.loss, loss, 1e-12 * (1.0 + loss));
  }
  EXPECT_EQ(fr.beta_final, fr.iterates.back().beta);
  for (Index i : fr.support) EXPECT_GT(std::abs(fr.beta_final(i)), cfg.nnz_threshold);
  EXPECT_EQ(static_cast<Index>(fr.support.size()), count_nonzero(fr.beta_final, 1e-8));
}

TEST(GepFit, StabilityStopNeedsFourStages) {
  const CleanInstance c = clean_instance(30, 100, 7);
  GepConfig cfg;
  cfg.lambda = 0.05;
  cfg.k_max = 3;
  EXPECT_EQ(fit(c.cal, cfg).stopped_by, StopReason::k_max);
  cfg.k_max = 10;
  const FitResult fr = fit(c.cal, cfg);
  EXPECT_EQ(fr.stopped_by, StopReason::stability);
  EXPECT_EQ(fr.stages_run, 4);
}

TEST(GepFit, LaterStagesReduceBias) {
  const CleanInstance c = clean_instance(60, 200, 8);
  GepConfig cfg;
  cfg.lambda = 0.1;
  const FitResult fr = fit(c.cal, cfg);
  ASSERT_GE(fr.iterates.size(), 2U);
  const double first = (fr.iterates.front().beta - c.beta_star).norm();
  const double last = (fr.beta_final - c.beta_star).norm();
  EXPECT_LT(last, first);
}

TEST(GepConfigValidation, RejectsBadValues) {
  GepConfig cfg;
  cfg.a = 1.0;
  EXPECT_THROW(cfg.validate(3), std::invalid_argument);
  cfg = GepConfig{};
  cfg.w0 = Vector::Constant(3, 0.6);
  EXPECT_THROW(cfg.validate(3), std::invalid_argument);
  cfg.w0 = Vector::Constant(2, 0.1);
  EXPECT_THROW(cfg.validate(3), std::invalid_argument);
  cfg = GepConfig{};
  cfg.lambda = 0.0;
  EXPECT_THROW(cfg.validate(3), std::invalid_argument);
}
