#include "caznrls/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace caznrls;

namespace {

// Direct transcription of the sign-count formulas, used as a second count.
struct Counts {
  long nc = 0;
  long nnz = 0;
};

Counts scripted_count(const Vector& f, const Vector& star) {
  const auto sgn = [](double v) { return std::abs(v) > 1e-8 ? (v > 0 ? 1 : -1) : 0; };
  Counts c;
  for (Index i = 0; i < f.size(); ++i) {
    if (sgn(f(i)) != 0) ++c.nnz;
    if (star(i) != 0.0 && sgn(f(i)) == sgn(star(i))) ++c.nc;
  }
  return c;
}

}  // namespace

TEST(Metrics, PerfectRecovery) {
  Vector b = Vector::Zero(10);
  b(2) = 1.0;
  b(7) = -2.0;
  const RecoveryMetrics m = metrics(b, b);
  EXPECT_DOUBLE_EQ(m.rmse_rel, 0.0);
  EXPECT_EQ(m.nc, 2);
  EXPECT_EQ(m.nic, 0);
  EXPECT_EQ(m.nnz, 2);
}

TEST(Metrics, NullEstimator) {
  Vector b = Vector::Zero(5);
  b(0) = 3.0;
  b(3) = -1.0;
  const RecoveryMetrics m = metrics(Vector::Zero(5), b);
  EXPECT_DOUBLE_EQ(m.rmse_rel, 1.0);
  EXPECT_EQ(m.nc, 0);
  EXPECT_EQ(m.nnz, 0);
  EXPECT_EQ(m.nic, 0);
}

TEST(Metrics, HandExample) {
  Vector star = Vector::Zero(6), f = Vector::Zero(6);
  star << 3.0, 1.5, 2.0, 0.0, 0.0, 0.0;
  f << 2.9, -1.0, 2.0, 0.5, 0.0, 0.0;
  const RecoveryMetrics m = metrics(f, star);
  EXPECT_EQ(m.nc, 2);
  EXPECT_EQ(m.nnz, 4);
  EXPECT_EQ(m.nic, 2);
  EXPECT_NEAR(m.rmse_rel, (f - star).norm() / star.norm(), 1e-15);
}

TEST(Metrics, ThresholdAppliesBeforeSign) {
  Vector star = Vector::Zero(3), f = Vector::Zero(3);
  star << 1.0, 0.0, -1.0;
  f << 5e-9, 2e-8, -1.0;
  const RecoveryMetrics m = metrics(f, star);
  EXPECT_EQ(m.nnz, 2);
  EXPECT_EQ(m.nc, 1);
  EXPECT_EQ(m.nic, 1);
}

TEST(Metrics, AgreesWithScriptedCount) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::bernoulli_distribution keep(0.3);
  for (int t = 0; t < 500; ++t) {
    Vector star = Vector::Zero(30), f = Vector::Zero(30);
    for (Index i = 0; i < 30; ++i) {
      if (i < 5) star(i) = nd(rng);
      if (keep(rng)) f(i) = nd(rng);
    }
    const RecoveryMetrics m = metrics(f, star);
    const Counts c = scripted_count(f, star);
    EXPECT_EQ(m.nc, c.nc);
    EXPECT_EQ(m.nnz, c.nnz);
    EXPECT_EQ(m.nic, c.nnz - c.nc);
    EXPECT_GE(m.nic, 0);
    EXPECT_GE(m.rmse_rel, 0.0);
  }
}

TEST(Metrics, RejectsZeroTruthAndSizeMismatch) {
  EXPECT_THROW(metrics(Vector::Ones(3), Vector::Zero(3)), std::invalid_argument);
  EXPECT_THROW(metrics(Vector::Ones(3), Vector::Ones(4)), std::invalid_argument);
}
