#include "caznrls/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace caznrls {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void get_if(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

AlmParams alm_from_json(const json& j, AlmParams a) {
  check_keys(j, {"mu0", "mu_growth", "mu_max", "tol", "max_alm_iters", "newton"}, "alm");
  get_if(j, "mu0", a.mu0, "alm");
  get_if(j, "mu_growth", a.mu_growth, "alm");
  get_if(j, "mu_max", a.mu_max, "alm");
  get_if(j, "tol", a.tol, "alm");
  get_if(j, "max_alm_iters", a.max_alm_iters, "alm");
  if (j.contains("newton")) {
    const json& nj = j["newton"];
    check_keys(nj, {"theta", "varsigma", "delta", "rho_ls", "max_newton_iters", "max_cg_iters"},
               "alm.newton");
    get_if(nj, "theta", a.newton.theta, "alm.newton");
    get_if(nj, "varsigma", a.newton.varsigma, "alm.newton");
    get_if(nj, "delta", a.newton.delta, "alm.newton");
    get_if(nj, "rho_ls", a.newton.rho_ls, "alm.newton");
    get_if(nj, "max_newton_iters", a.newton.max_newton_iters, "alm.newton");
    get_if(nj, "max_cg_iters", a.newton.max_cg_iters, "alm.newton");
  }
  return a;
}

json alm_to_json(const AlmParams& a) {
  return {{"mu0", a.mu0},
          {"mu_growth", a.mu_growth},
          {"mu_max", a.mu_max},
          {"tol", a.tol},
          {"max_alm_iters", a.max_alm_iters},
          {"newton",
           {{"theta", a.newton.theta},
            {"varsigma", a.newton.varsigma},
            {"delta", a.newton.delta},
            {"rho_ls", a.newton.rho_ls},
            {"max_newton_iters", a.newton.max_newton_iters},
            {"max_cg_iters", a.newton.max_cg_iters}}}};
}

}  // namespace

ScenarioSpec scenario_from_json(const json& j) {
  check_keys(j, {"example", "p", "s", "alpha", "n", "tau", "sigma", "corruption", "normalize"},
             "scenario");
  ScenarioSpec s;
  std::string ex = "Ex2";
  get_if(j, "example", ex, "scenario");
  try {
    s.example = parse_example(ex);
    if (j.contains("corruption")) s.corruption = parse_error_kind(j["corruption"].get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  get_if(j, "p", s.p, "scenario");
  get_if(j, "alpha", s.alpha, "scenario");
  get_if(j, "tau", s.tau, "scenario");
  get_if(j, "sigma", s.sigma_noise, "scenario");
  get_if(j, "normalize", s.normalize, "scenario");
  if (j.contains("s")) {
    Index v = 0;
    get_if(j, "s", v, "scenario");
    s.s = v;
  }
  if (j.contains("n")) {
    Index v = 0;
    get_if(j, "n", v, "scenario");
    s.n = v;
  }
  return s;
}

json scenario_to_json(const ScenarioSpec& s) {
  json j = {{"example", to_string(s.example)},
            {"p", s.p},
            {"s", s.sparsity()},
            {"n", s.sample_size()},
            {"alpha", s.alpha},
            {"tau", s.tau},
            {"sigma", s.sigma_noise},
            {"corruption", to_string(s.error_kind())},
            {"normalize", s.normalize}};
  return j;
}

ExperimentConfig parse_experiment_config(const json& j) {
  check_keys(j,
             {"scenarios", "alphas", "methods", "replications", "first_replication", "base_seed",
              "cv", "gep", "alm", "admm", "ncl", "eps_hat", "metric_threshold", "diagnostics",
              "rec_samples", "record_timing", "jobs", "output", "preset"},
             "config");
  ExperimentConfig cfg;
  if (j.contains("preset")) {
    const std::string preset = j["preset"].get<std::string>();
    if (preset != "table1") throw ConfigError("config: unknown preset '" + preset + "'");
    cfg = table1_preset(100);
  }
  if (j.contains("scenarios")) {
    if (!j["scenarios"].is_array()) throw ConfigError("config.scenarios: expected an array");
    cfg.scenarios.clear();
    std::vector<double> alphas;
    get_if(j, "alphas", alphas, "config");
    for (const json& sj : j["scenarios"]) {
      ScenarioSpec base = scenario_from_json(sj);
      // "alphas" expands every scenario into one entry per sample-size multiplier.
      if (alphas.empty()) {
        cfg.scenarios.push_back(base);
      } else {
        for (double a : alphas) {
          ScenarioSpec s = base;
          s.alpha = a;
          cfg.scenarios.push_back(s);
        }
      }
    }
  }
  if (j.contains("methods")) {
    cfg.methods.clear();
    try {
      for (const auto& m : j["methods"]) cfg.methods.push_back(parse_method(m.get<std::string>()));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config.methods: ") + e.what());
    }
  }
  get_if(j, "replications", cfg.replications, "config");
  get_if(j, "first_replication", cfg.first_replication, "config");
  get_if(j, "base_seed", cfg.base_seed, "config");
  get_if(j, "metric_threshold", cfg.metric_threshold, "config");
  get_if(j, "diagnostics", cfg.diagnostics, "config");
  get_if(j, "rec_samples", cfg.rec_samples, "config");
  get_if(j, "record_timing", cfg.record_timing, "config");
  get_if(j, "jobs", cfg.jobs, "config");
  if (j.contains("eps_hat") && !j["eps_hat"].is_null()) {
    double e = 0.0;
    get_if(j, "eps_hat", e, "config");
    cfg.settings.eps_hat = e;
  }

  MethodSettings& ms = cfg.settings;
  if (j.contains("cv")) {
    const json& c = j["cv"];
    check_keys(c, {"folds", "score_matrix", "alpha_grid", "lambda_floor"}, "cv");
    if (c.contains("score_matrix")) {
      std::string sm;
      get_if(c, "score_matrix", sm, "cv");
      if (sm == "surrogate")
        ms.cv.score_matrix = CvScoreMatrix::surrogate;
      else if (sm == "calibrated")
        ms.cv.score_matrix = CvScoreMatrix::calibrated;
      else
        throw ConfigError("cv.score_matrix: expected \"surrogate\" or \"calibrated\"");
    }
    get_if(c, "folds", ms.cv.folds, "cv");
    get_if(c, "alpha_grid", ms.cv.alpha_grid, "cv");
    get_if(c, "lambda_floor", ms.cv.lambda_floor, "cv");
  }
  if (j.contains("alm")) ms.gep.alm = alm_from_json(j["alm"], ms.gep.alm);
  if (j.contains("gep")) {
    const json& g = j["gep"];
    check_keys(g, {"a", "k_max", "rho0", "rho_cap", "stop_nnz_delta", "stop_loss_delta",
                   "nnz_threshold"},
               "gep");
    get_if(g, "a", ms.gep.a, "gep");
    get_if(g, "k_max", ms.gep.k_max, "gep");
    get_if(g, "rho0", ms.gep.rho0, "gep");
    get_if(g, "rho_cap", ms.gep.rho_cap, "gep");
    get_if(g, "stop_nnz_delta", ms.gep.stop_nnz_delta, "gep");
    get_if(g, "stop_loss_delta", ms.gep.stop_loss_delta, "gep");
    get_if(g, "nnz_threshold", ms.gep.nnz_threshold, "gep");
  }
  if (j.contains("admm")) {
    const json& a = j["admm"];
    check_keys(a, {"mu", "tau_step", "tol_pinf", "tol_dinf", "tol_gap_scaled", "gap_weight",
                   "max_iters", "adapt_every", "adapt_ratio"},
               "admm");
    get_if(a, "mu", ms.admm.mu, "admm");
    get_if(a, "tau_step", ms.admm.tau_step, "admm");
    get_if(a, "tol_pinf", ms.admm.tol_pinf, "admm");
    get_if(a, "tol_dinf", ms.admm.tol_dinf, "admm");
    get_if(a, "tol_gap_scaled", ms.admm.tol_gap_scaled, "admm");
    get_if(a, "gap_weight", ms.admm.gap_weight, "admm");
    get_if(a, "max_iters", ms.admm.max_iters, "admm");
    get_if(a, "adapt_every", ms.admm.adapt_every, "admm");
    get_if(a, "adapt_ratio", ms.admm.adapt_ratio, "admm");
  }
  if (j.contains("ncl")) {
    const json& n = j["ncl"];
    check_keys(n, {"step_rule", "max_iters", "tol"}, "ncl");
    std::string rule = "fixed";
    get_if(n, "step_rule", rule, "ncl");
    if (rule == "fixed") ms.ncl.step_rule = NclStepRule::fixed_inverse_spectral;
    else if (rule == "backtracking") ms.ncl.step_rule = NclStepRule::backtracking;
    else throw ConfigError("ncl.step_rule: expected 'fixed' or 'backtracking'");
    get_if(n, "max_iters", ms.ncl.max_iters, "ncl");
    get_if(n, "tol", ms.ncl.tol, "ncl");
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, {"records", "aggregate", "plotdata"}, "output");
    get_if(o, "records", cfg.output.records, "output");
    get_if(o, "aggregate", cfg.output.aggregate, "output");
    get_if(o, "plotdata", cfg.output.plotdata, "output");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(is, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return parse_experiment_config(j);
}

json to_json(const ExperimentConfig& cfg) {
  json scen = json::array();
  for (const auto& s : cfg.scenarios) scen.push_back(scenario_to_json(s));
  json methods = json::array();
  for (Method m : cfg.methods) methods.push_back(to_string(m));
  const MethodSettings& ms = cfg.settings;
  return {{"scenarios", scen},
          {"methods", methods},
          {"replications", cfg.replications},
          {"first_replication", cfg.first_replication},
          {"base_seed", cfg.base_seed},
          {"metric_threshold", cfg.metric_threshold},
          {"diagnostics", cfg.diagnostics},
          {"rec_samples", cfg.rec_samples},
          {"record_timing", cfg.record_timing},
          {"eps_hat", ms.eps_hat ? json(*ms.eps_hat) : json(nullptr)},
          {"cv",
           {{"folds", ms.cv.folds},
            {"score_matrix",
             ms.cv.score_matrix == CvScoreMatrix::calibrated ? "calibrated" : "surrogate"},
            {"alpha_grid", ms.cv.alpha_grid},
            {"lambda_floor", ms.cv.lambda_floor}}},
          {"gep",
           {{"a", ms.gep.a},
            {"k_max", ms.gep.k_max},
            {"rho0", ms.gep.rho0},
            {"rho_cap", ms.gep.rho_cap},
            {"stop_nnz_delta", ms.gep.stop_nnz_delta},
            {"stop_loss_delta", ms.gep.stop_loss_delta},
            {"nnz_threshold", ms.gep.nnz_threshold}}},
          {"alm", alm_to_json(ms.gep.alm)},
          {"admm",
           {{"mu", ms.admm.mu},
            {"tau_step", ms.admm.tau_step},
            {"tol_pinf", ms.admm.tol_pinf},
            {"tol_dinf", ms.admm.tol_dinf},
            {"tol_gap_scaled", ms.admm.tol_gap_scaled},
            {"gap_weight", ms.admm.gap_weight},
            {"max_iters", ms.admm.max_iters},
            {"adapt_every", ms.admm.adapt_every},
            {"adapt_ratio", ms.admm.adapt_ratio}}},
          {"ncl",
           {{"step_rule",
             ms.ncl.step_rule == NclStepRule::fixed_inverse_spectral ? "fixed" : "backtracking"},
            {"max_iters", ms.ncl.max_iters},
            {"tol", ms.ncl.tol}}}};
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace caznrls
