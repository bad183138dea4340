#include "caznrls/config.hpp"

#include <gtest/gtest.h>

using namespace caznrls;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "scenarios": [{"example": "Ex2", "p": 50, "tau": 0.5}],
    "methods": ["caznrls", "cocolasso"],
    "replications": 3
  })");
}

}  // namespace

TEST(Config, ParsesMinimalFile) {
  const ExperimentConfig cfg = parse_experiment_config(minimal());
  ASSERT_EQ(cfg.scenarios.size(), 1U);
  EXPECT_EQ(cfg.scenarios[0].example, ExampleId::Ex2);
  EXPECT_EQ(cfg.scenarios[0].p, 50);
  EXPECT_DOUBLE_EQ(cfg.scenarios[0].tau, 0.5);
  EXPECT_EQ(cfg.methods, (std::vector<Method>{Method::caznrls, Method::cocolasso}));
  EXPECT_EQ(cfg.replications, 3);
  // Experiment defaults survive parsing.
  EXPECT_DOUBLE_EQ(cfg.settings.admm.mu, experiment_settings().admm.mu);
  EXPECT_EQ(cfg.settings.cv.score_matrix, CvScoreMatrix::calibrated);
}

TEST(Config, AlphasExpandScenarios) {
  json j = minimal();
  j["alphas"] = {2.0, 4.0, 6.0};
  const ExperimentConfig cfg = parse_experiment_config(j);
  ASSERT_EQ(cfg.scenarios.size(), 3U);
  EXPECT_DOUBLE_EQ(cfg.scenarios[2].alpha, 6.0);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  json j = minimal();
  j["replicates"] = 3;
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
  j = minimal();
  j["cv"] = {{"folds", 5}, {"bogus", 1}};
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
  j = minimal();
  j["cv"] = {{"score_matrix", "raw"}};
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
  j = minimal();
  j["methods"] = {"ridge"};
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
  j = minimal();
  j["cv"] = {{"folds", 1}};
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
  j = minimal();
  j["preset"] = "table2";
  EXPECT_THROW(parse_experiment_config(j), ConfigError);
}

TEST(Config, ScoreMatrixChoice) {
  json j = minimal();
  j["cv"] = {{"score_matrix", "surrogate"}};
  EXPECT_EQ(parse_experiment_config(j).settings.cv.score_matrix, CvScoreMatrix::surrogate);
  j["cv"] = {{"score_matrix", "calibrated"}};
  EXPECT_EQ(parse_experiment_config(j).settings.cv.score_matrix, CvScoreMatrix::calibrated);
}

TEST(Config, PresetLoadsTable) {
  const ExperimentConfig cfg = parse_experiment_config(json{{"preset", "table1"}, {"replications", 4}});
  EXPECT_EQ(cfg.scenarios.size(), 3U);
  EXPECT_EQ(cfg.replications, 4);
}

TEST(Config, RoundTripThroughCanonicalJson) {
  json j = minimal();
  j["admm"] = {{"mu", 0.5}};
  j["eps_hat"] = 0.02;
  const ExperimentConfig a = parse_experiment_config(j);
  const ExperimentConfig b = parse_experiment_config(to_json(a));
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_DOUBLE_EQ(*b.settings.eps_hat, 0.02);
}

TEST(Config, HashIgnoresJobsAndPaths) {
  ExperimentConfig a = parse_experiment_config(minimal());
  const std::string h = config_hash(a);
  EXPECT_EQ(h.size(), 16U);
  a.jobs = 7;
  a.output.records = "x.csv";
  EXPECT_EQ(config_hash(a), h);
  a.base_seed += 1;
  EXPECT_NE(config_hash(a), h);
  a.base_seed -= 1;
  a.settings.cv.score_matrix = CvScoreMatrix::surrogate;
  EXPECT_NE(config_hash(a), h);
}
