#include "caznrls/calibration.hpp"
#include "caznrls/linalg.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace caznrls;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

SurrogatePair random_pair(Index p, Index n, std::mt19937_64& rng) {
  SurrogatePair pair;
  pair.sigma_hat = oracle::random_symmetric(p, rng);
  pair.xi_hat = oracle::random_vector(p, rng);
  pair.n = n;
  return pair;
}

}  // namespace

TEST(SymEig, DescendingOrthonormal) {
  std::mt19937_64 rng(1);
  const Matrix a = oracle::random_symmetric(12, rng);
  const SymEigen e = sym_eig(a);
  for (Index i = 1; i < 12; ++i) EXPECT_GE(e.values(i - 1), e.values(i));
  EXPECT_LE((e.vectors.transpose() * e.vectors - Matrix::Identity(12, 12)).norm(),
            1e-10 * std::sqrt(12.0));
  EXPECT_LE((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - a).norm(), 1e-12 * 12);
}

TEST(SymEig, RejectsNonFinite) {
  Matrix a = Matrix::Identity(3, 3);
  a(1, 1) = std::nan("");
  EXPECT_THROW(sym_eig(a), std::invalid_argument);
}

TEST(PsdPart, MatchesSpectralClamp) {
  std::mt19937_64 rng(2);
  const Matrix a = oracle::random_symmetric(15, rng);
  const SymEigen e = sym_eig(a);
  const Matrix ref = spectral_apply(e, [](double t) { return std::max(t, 0.0); });
  EXPECT_LE((psd_part(e) - ref).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(is_exactly_symmetric(psd_part(e)));
}

TEST(PsdProject, DiagonalClamp) {
  const PsdProjection pr = psd_project(diag2(4.0, -1.0), 0.25);
  EXPECT_LE((pr.sigma_tilde - diag2(4.0, 0.25)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_DOUBLE_EQ(pr.eigvals(0), 4.0);
  EXPECT_DOUBLE_EQ(pr.eigvals(1), -1.0);
}

TEST(PsdProject, FixedPointWhenAlreadyFeasible) {
  std::mt19937_64 rng(3);
  const Matrix b = oracle::random_matrix(6, 6, rng);
  const Matrix s = symmetrize(b * b.transpose() + Matrix::Identity(6, 6));
  const PsdProjection pr = psd_project(s, 0.5);
  EXPECT_LE((pr.sigma_tilde - s).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PsdProject, RejectsBadInput) {
  EXPECT_THROW(psd_project(Matrix::Identity(2, 2), 0.0), std::invalid_argument);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 1.0;
  EXPECT_THROW(psd_project(asym, 0.1), std::invalid_argument);
}

// First-order optimality: no small feasible perturbation gets closer.
TEST(PsdProject, NoFeasiblePerturbationIsCloser) {
  std::mt19937_64 rng(4);
  const double eps = 0.1;
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix s = oracle::random_symmetric(6, rng);
    const PsdProjection pr = psd_project(s, eps);
    const double base = (pr.sigma_tilde - s).norm();
    int feasible = 0;
    for (int k = 0; k < 500; ++k) {
      const Matrix delta = oracle::random_symmetric(6, rng);
      for (double t : {1e-1, 1e-2, 1e-3}) {
        const Matrix w = pr.sigma_tilde + t * delta;
        if (oracle::min_eig(w) < eps) continue;
        ++feasible;
        EXPECT_GE((w - s).norm(), base - 1e-12);
      }
    }
    EXPECT_GT(feasible, 0);
  }
}

TEST(PsdProject, BeatsRandomFeasiblePoints) {
  std::mt19937_64 rng(5);
  const double eps = 0.05;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix s = oracle::random_symmetric(8, rng);
    const PsdProjection pr = psd_project(s, eps);
    const double base = (pr.sigma_tilde - s).norm();
    for (int k = 0; k < 200; ++k) {
      const Matrix b = oracle::random_matrix(8, 8, rng);
      const Matrix w = b * b.transpose() * 0.2 + eps * Matrix::Identity(8, 8);
      EXPECT_LT(base, (w - s).norm());
    }
  }
}

TEST(Calibrate, DiagonalClosedForm) {
  SurrogatePair pair;
  pair.sigma_hat = diag2(4.0, -1.0);
  pair.xi_hat = Vector(2);
  pair.xi_hat << 2.0, 1.0;
  pair.n = 4;
  const CalibratedPair cal = calibrate(pair, 0.25);
  EXPECT_LE((cal.z_tilde - diag2(4.0, 1.0)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(cal.y_tilde(0), 2.0, 1e-14);
  EXPECT_NEAR(cal.y_tilde(1), 4.0, 1e-14);
  const Vector back = cal.z_tilde.transpose() * cal.y_tilde / 4.0;
  EXPECT_NEAR(back(0), 2.0, 1e-14);
  EXPECT_NEAR(back(1), 1.0, 1e-14);
}

TEST(Calibrate, UniformClampWhenFloorExceedsSpectrum) {
  std::mt19937_64 rng(6);
  SurrogatePair pair = random_pair(5, 9, rng);
  const double eps = 1e3;
  const CalibratedPair cal = calibrate(pair, eps);
  const Matrix expect = std::sqrt(9.0 * eps) * Matrix::Identity(5, 5);
  EXPECT_LE((cal.z_tilde - expect).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Calibrate, ReconstructionIdentities) {
  std::mt19937_64 rng(7);
  for (Index p : {3, 10, 40}) {
    const SurrogatePair pair = random_pair(p, 30, rng);
    const CalibratedPair cal = calibrate(pair);
    const double n = 30.0;
    EXPECT_LE((cal.sigma_tilde - cal.z_tilde.transpose() * cal.z_tilde / n).norm(),
              1e-10 * std::max(1.0, cal.sigma_tilde.norm()));
    EXPECT_LE((pair.xi_hat - cal.z_tilde.transpose() * cal.y_tilde / n).lpNorm<Eigen::Infinity>(),
              1e-10 * std::max(1.0, pair.xi_hat.lpNorm<Eigen::Infinity>()));
    EXPECT_LE((cal.eigvecs.transpose() * cal.eigvecs - Matrix::Identity(p, p)).norm(),
              1e-10 * std::sqrt(static_cast<double>(p)));
    EXPECT_GE(oracle::min_eig(cal.sigma_tilde), cal.eps_hat - 1e-9);
    EXPECT_TRUE(is_exactly_symmetric(cal.z_tilde));
  }
}

TEST(Calibrate, DefaultFloorIsScaleAware) {
  EXPECT_DOUBLE_EQ(default_eps_hat(0.5), 1e-2);
  EXPECT_DOUBLE_EQ(default_eps_hat(300.0), 3.0);
  std::mt19937_64 rng(8);
  const SurrogatePair pair = random_pair(7, 10, rng);
  const CalibratedPair cal = calibrate(pair);
  EXPECT_DOUBLE_EQ(cal.eps_hat, default_eps_hat(cal.eigvals(0)));
}

TEST(Calibrate, IdempotentOnPositiveDefiniteInput) {
  std::mt19937_64 rng(9);
  const Matrix b = oracle::random_matrix(9, 9, rng);
  SurrogatePair pair;
  pair.sigma_hat = symmetrize(b * b.transpose() + 2.0 * Matrix::Identity(9, 9));
  pair.xi_hat = oracle::random_vector(9, rng);
  pair.n = 12;
  const CalibratedPair cal = calibrate(pair, 1.0);
  EXPECT_LE((cal.sigma_tilde - pair.sigma_hat).norm(), 1e-10 * pair.sigma_hat.norm());
}

TEST(Calibrate, OneEigendecompositionPerCall) {
  std::mt19937_64 rng(10);
  const SurrogatePair pair = random_pair(20, 25, rng);
  const std::uint64_t before = sym_eig_call_count();
  (void)calibrate(pair);
  EXPECT_EQ(sym_eig_call_count() - before, 1U);
  const std::uint64_t mid = sym_eig_call_count();
  (void)calibrate(pair, 0.3);
  EXPECT_EQ(sym_eig_call_count() - mid, 1U);
}

TEST(Calibrate, RejectsInconsistentPair) {
  SurrogatePair pair;
  pair.sigma_hat = Matrix::Identity(3, 3);
  pair.xi_hat = Vector::Ones(2);
  pair.n = 5;
  EXPECT_THROW(calibrate(pair), std::invalid_argument);
  pair.xi_hat = Vector::Ones(3);
  pair.n = 0;
  EXPECT_THROW(calibrate(pair), std::invalid_argument);
}
