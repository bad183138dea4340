#include "caznrls/simulation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace caznrls;

namespace {

ScenarioSpec spec_of(ExampleId ex, Index p, double alpha = 5.0) {
  ScenarioSpec s;
  s.example = ex;
  s.p = p;
  s.alpha = alpha;
  return s;
}

}  // namespace

TEST(Scenario, SparsityAndSampleSize) {
  EXPECT_EQ(spec_of(ExampleId::Ex2, 100).sparsity(), 5);
  const ScenarioSpec big = spec_of(ExampleId::Ex2, 1000);
  EXPECT_EQ(big.sparsity(), 15);
  EXPECT_EQ(big.sample_size(), 518);
  ScenarioSpec f = spec_of(ExampleId::Fixed52, 250);
  f.corruption = ErrorKind::additive;
  EXPECT_EQ(f.sparsity(), 3);
  EXPECT_EQ(f.sample_size(), 100);
  f.n = 77;
  EXPECT_EQ(f.sample_size(), 77);
}

TEST(Scenario, Validation) {
  EXPECT_THROW(spec_of(ExampleId::Ex1, 3).validate(), std::invalid_argument);
  ScenarioSpec f = spec_of(ExampleId::Fixed52, 250);
  EXPECT_THROW(f.validate(), std::invalid_argument);  // no corruption model given
  f.corruption = ErrorKind::missing;
  f.tau = 1.0;
  EXPECT_THROW(f.validate(), std::invalid_argument);
  f.tau = 0.5;
  EXPECT_NO_THROW(f.validate());
  ScenarioSpec s = spec_of(ExampleId::Ex2, 50);
  s.s = 60;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Scenario, ParseNames) {
  EXPECT_EQ(parse_example("Ex4"), ExampleId::Ex4);
  EXPECT_EQ(parse_example("ex7"), ExampleId::Ex7);
  EXPECT_EQ(parse_example("3"), ExampleId::Ex3);
  EXPECT_EQ(parse_example("fixed52"), ExampleId::Fixed52);
  EXPECT_EQ(parse_example(to_string(ExampleId::Fixed52)), ExampleId::Fixed52);
  EXPECT_THROW(parse_example("Ex9"), std::invalid_argument);
  EXPECT_EQ(parse_error_kind("missing"), ErrorKind::missing);
  EXPECT_THROW(parse_error_kind("other"), std::invalid_argument);
  EXPECT_EQ(*default_error_kind(ExampleId::Ex5), ErrorKind::multiplicative);
  EXPECT_EQ(*default_error_kind(ExampleId::Ex7), ErrorKind::missing);
  EXPECT_FALSE(default_error_kind(ExampleId::Fixed52).has_value());
}

TEST(GenBeta, FixedSupport) {
  Rng rng(1);
  const BetaDraw b = gen_beta(250, 3, BetaMode::fixed_52, rng);
  EXPECT_EQ(b.support_star, (std::vector<Index>{0, 1, 4}));
  EXPECT_DOUBLE_EQ(b.beta_star(0), 3.0);
  EXPECT_DOUBLE_EQ(b.beta_star(1), 1.5);
  EXPECT_DOUBLE_EQ(b.beta_star(4), 2.0);
  EXPECT_EQ((b.beta_star.array() != 0.0).count(), 3);
}

TEST(GenBeta, RandomSupportIsUniformSubset) {
  Rng rng(2);
  std::vector<int> hits(20, 0);
  for (int r = 0; r < 4000; ++r) {
    const BetaDraw b = gen_beta(20, 4, BetaMode::random_normal, rng);
    ASSERT_EQ(b.support_star.size(), 4U);
    EXPECT_EQ(std::set<Index>(b.support_star.begin(), b.support_star.end()).size(), 4U);
    for (Index j : b.support_star) {
      ++hits[static_cast<std::size_t>(j)];
      EXPECT_NE(b.beta_star(j), 0.0);
    }
    EXPECT_EQ((b.beta_star.array() != 0.0).count(), 4);
  }
  // Each index is chosen with probability 1/5: 800 expected, sd ~ 25.
  for (int h : hits) EXPECT_NEAR(h, 800, 125);
}

TEST(GenBeta, SeededDeterminism) {
  Rng a(7), b(7);
  const BetaDraw x = gen_beta(100, 5, BetaMode::random_normal, a);
  const BetaDraw y = gen_beta(100, 5, BetaMode::random_normal, b);
  EXPECT_EQ(x.beta_star, y.beta_star);
  EXPECT_EQ(x.support_star, y.support_star);
}

TEST(GenDesign, Ar1LagOneCorrelation) {
  ScenarioSpec s = spec_of(ExampleId::Fixed52, 6);
  s.corruption = ErrorKind::additive;
  Rng rng(3);
  const Matrix x = gen_design(s, 100000, {}, rng);
  for (Index j = 1; j < 6; ++j) {
    const double c = x.col(j).dot(x.col(j - 1)) / 100000.0;
    EXPECT_NEAR(c, 0.5, 0.01);
  }
  EXPECT_NEAR(x.col(3).squaredNorm() / 100000.0, 1.0, 0.02);
  EXPECT_NEAR(x.col(0).dot(x.col(2)) / 100000.0, 0.25, 0.01);
}

TEST(GenDesign, LaplaceUnitVariance) {
  Rng rng(4);
  const Matrix x = gen_design(spec_of(ExampleId::Ex5, 10), 100000, {}, rng);
  const double mean = x.mean();
  const double var = (x.array() - mean).square().mean();
  EXPECT_NEAR(var, 1.0, 0.01);
  EXPECT_NEAR(mean, 0.0, 0.01);
}

TEST(GenDesign, GaussianAndOtherMoments) {
  Rng rng(5);
  const Matrix g = gen_design(spec_of(ExampleId::Ex1, 10), 100000, {}, rng);
  EXPECT_NEAR(g.mean(), 0.0, 0.01);
  const Matrix u = gen_design(spec_of(ExampleId::Ex3, 10), 100000, {}, rng);
  EXPECT_NEAR(u.mean(), 0.5, 0.01);
  EXPECT_GE(u.minCoeff(), 0.0);
  EXPECT_LE(u.maxCoeff(), 1.0);
  const Matrix e = gen_design(spec_of(ExampleId::Ex7, 10), 100000, {}, rng);
  EXPECT_NEAR(e.mean(), 1.0, 0.01);
  EXPECT_NEAR((e.array() - e.mean()).square().mean(), 1.0, 0.02);
}

TEST(GenDesign, Ex8ScalesOffSupport) {
  Rng rng(6);
  const Matrix x = gen_design(spec_of(ExampleId::Ex8, 6), 50000, {1, 4}, rng);
  for (Index j = 0; j < 6; ++j) {
    const double sd = std::sqrt(x.col(j).squaredNorm() / 50000.0);
    EXPECT_NEAR(sd, (j == 1 || j == 4) ? 1.0 : 5.0, 0.1) << j;
  }
}

TEST(GenDesign, NormalizeFlag) {
  ScenarioSpec s = spec_of(ExampleId::Ex3, 8);
  s.normalize = true;
  Rng rng(7);
  const Matrix x = gen_design(s, 40, {}, rng);
  for (Index j = 0; j < 8; ++j) EXPECT_NEAR(x.col(j).squaredNorm() / 40.0, 1.0, 1e-12);
}

TEST(Corrupt, ZeroAdditiveNoiseIsIdentity) {
  Rng rng(8);
  const Matrix x = gen_design(spec_of(ExampleId::Ex1, 5), 7, {}, rng);
  const Corruption c = corrupt(x, ErrorKind::additive, 0.0, rng);
  EXPECT_EQ(c.z, x);
  EXPECT_EQ(std::get<AdditiveError>(c.error_model).sigma_a, Matrix::Zero(5, 5));
}

TEST(Corrupt, LognormalMean) {
  Rng rng(9);
  const Matrix ones = Matrix::Ones(1000, 1000);
  const Corruption c = corrupt(ones, ErrorKind::multiplicative, 0.5, rng);
  EXPECT_NEAR(c.z.mean(), std::exp(0.125), 0.01);
  const MultiplicativeError& m = std::get<MultiplicativeError>(c.error_model);
  EXPECT_NEAR(m.mu_m(0), std::exp(0.125), 1e-15);
  const Matrix second = m.sigma_m + m.mu_m * m.mu_m.transpose();
  EXPECT_NEAR(second(0, 0), std::exp(0.5), 1e-14);
  EXPECT_NEAR(second(0, 1), std::exp(0.25), 1e-14);
  // Empirical second moment of one entry.
  EXPECT_NEAR(c.z.array().square().mean(), std::exp(0.5), 0.02);
}

TEST(Corrupt, MissingRate) {
  Rng rng(10);
  const Corruption c = corrupt(Matrix::Ones(500, 400), ErrorKind::missing, 0.3, rng);
  EXPECT_NEAR((c.z.array() == 0.0).cast<double>().mean(), 0.3, 0.005);
  EXPECT_DOUBLE_EQ(std::get<MissingError>(c.error_model).tau, 0.3);
  EXPECT_THROW(corrupt(Matrix::Ones(2, 2), ErrorKind::missing, 1.0, rng), std::invalid_argument);
}

TEST(GenResponse, NoiselessAndNoiseScale) {
  Rng rng(11);
  const Matrix x = gen_design(spec_of(ExampleId::Ex1, 6), 30, {}, rng);
  Vector b = Vector::Zero(6);
  b(2) = 1.5;
  EXPECT_EQ(gen_response(x, b, 0.0, rng), x * b);
  const Index n = 200000;
  const Vector eps = gen_response(Matrix::Zero(n, 1), Vector::Zero(1), 0.5, rng);
  const double sd = std::sqrt((eps.array() - eps.mean()).square().sum() / (n - 1));
  EXPECT_NEAR(sd, 0.5, 3.0 * 0.5 / std::sqrt(2.0 * n));
}

TEST(Generate, BitwiseReproducible) {
  ScenarioSpec s = spec_of(ExampleId::Ex4, 40);
  s.tau = 0.5;
  s.seed = 99;
  const Dataset a = generate(s);
  const Dataset b = generate(s);
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.beta_star, b.beta_star);
  s.seed = 100;
  EXPECT_NE(generate(s).z, a.z);
  EXPECT_EQ(a.z.rows(), s.sample_size());
  EXPECT_EQ(static_cast<Index>(a.support_star.size()), s.sparsity());
  EXPECT_TRUE(std::holds_alternative<MultiplicativeError>(a.error_model));
}

TEST(Generate, NoiselessResponseMatchesCleanDesign) {
  ScenarioSpec s = spec_of(ExampleId::Ex2, 30);
  s.sigma_noise = 0.0;
  s.seed = 5;
  const Dataset d = generate(s);
  EXPECT_LE((d.y - d.x * d.beta_star).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DeriveSeed, DistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(derive_seed(42, r));
  EXPECT_EQ(seen.size(), 1000U);
  EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
  EXPECT_NE(derive_seed(42, 7), derive_seed(43, 7));
}
