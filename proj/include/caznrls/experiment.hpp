#pragma once

#include "caznrls/cross_validation.hpp"
#include "caznrls/simulation.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace caznrls {

struct OutputPaths {
  std::string records;    // one row per (scenario, method, replication)
  std::string aggregate;  // means per (scenario, method)
  std::string plotdata;   // alpha-indexed curves per method
};

// Settings used by experiments unless overridden: ADMM starts from mu = 0.1
// and CV scores each fold against its calibrated held-out matrix.
MethodSettings experiment_settings();

struct ExperimentConfig {
  std::vector<ScenarioSpec> scenarios;  // the seed field of each entry is ignored
  std::vector<Method> methods{Method::caznrls, Method::cocolasso, Method::ncl};
  int replications = 100;
  int first_replication = 0;  // lets a long run be split into pieces
  std::uint64_t base_seed = 20240101;
  MethodSettings settings = experiment_settings();
  double metric_threshold = 1e-8;
  bool diagnostics = false;
  int rec_samples = 200;
  bool record_timing = true;  // false writes 0 for every wall_time_ms
  int jobs = 1;
  OutputPaths output;

  void validate() const;
};

struct DiagnosticColumns {
  double d_max = 0.0;
  double eps_tilde_inf = 0.0;
  double eps_ls_inf = 0.0;
  double irrepresentable = 0.0;
  std::optional<double> kappa_hat;
  std::optional<double> bound_thm2;
};

struct MetricsRecord {
  std::size_t scenario = 0;  // index into ExperimentConfig::scenarios
  ExampleId example = ExampleId::Ex1;
  ErrorKind error_kind = ErrorKind::additive;
  Index p = 0;
  Index s = 0;
  Index n = 0;
  double alpha = 0.0;
  double tau = 0.0;
  double sigma_noise = 0.0;
  Method method = Method::caznrls;
  std::uint64_t seed = 0;
  int rep_index = 0;
  double rmse_rel = 0.0;
  Index nc = 0;
  Index nic = 0;
  Index nnz = 0;
  double alpha_star = 0.0;
  double lambda_used = 0.0;
  double wall_time_ms = 0.0;
  bool converged = false;
  std::string error;
  std::optional<DiagnosticColumns> diag;
};

struct AggregateRow {
  std::size_t scenario = 0;
  Method method = Method::caznrls;
  int count = 0;  // records with finite metrics
  int failed = 0;
  int nonconverged = 0;
  double mean_rmse = 0.0;
  double mean_nc = 0.0;
  double mean_nic = 0.0;
  double mean_nnz = 0.0;
  double mean_time_ms = 0.0;
};

struct ExperimentResult {
  std::vector<MetricsRecord> records;  // ordered by scenario, method, replication
  std::vector<AggregateRow> aggregates;
  int nonconverged = 0;
};

// Seed of replication `rep` of scenario `scenario`.
std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t scenario, int rep);

// Runs every (scenario, replication) unit on a pool of `jobs` workers; all
// methods of a unit share one dataset. Output order does not depend on jobs.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::vector<AggregateRow> aggregate(const ExperimentConfig& cfg,
                                    const std::vector<MetricsRecord>& records);

// CSV writers; each file starts with a comment line carrying the schema
// version and the configuration hash.
void write_records_csv(std::ostream& os, const ExperimentConfig& cfg, const ExperimentResult& r);
void write_aggregate_csv(std::ostream& os, const ExperimentConfig& cfg, const ExperimentResult& r);
void write_plotdata_csv(std::ostream& os, const ExperimentConfig& cfg, const ExperimentResult& r);

// Writes the files named in cfg.output; empty paths are skipped.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& r);

// Fixed-support preset: p = 250, n = 100, AR(1) 0.5 design, sigma = 0.5,
// with additive tau = 1, multiplicative tau = 0.8 and missing tau = 0.5.
ExperimentConfig table1_preset(int replications);

}  // namespace caznrls
