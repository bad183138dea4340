#include "caznrls/experiment.hpp"

#include "caznrls/calibration.hpp"
#include "caznrls/config.hpp"
#include "caznrls/diagnostics.hpp"
#include "caznrls/metrics.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <tuple>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace caznrls {

MethodSettings experiment_settings() {
  MethodSettings ms;
  ms.admm.mu = 0.1;
  ms.cv.score_matrix = CvScoreMatrix::calibrated;
  return ms;
}

void ExperimentConfig::validate() const {
  if (scenarios.empty()) throw std::invalid_argument("experiment: no scenarios");
  if (methods.empty()) throw std::invalid_argument("experiment: no methods");
  if (replications < 1) throw std::invalid_argument("experiment: replications must be >= 1");
  if (first_replication < 0) throw std::invalid_argument("experiment: first replication must be >= 0");
  if (jobs < 1) throw std::invalid_argument("experiment: jobs must be >= 1");
  if (!(metric_threshold >= 0.0)) throw std::invalid_argument("experiment: bad metric threshold");
  if (rec_samples < 0) throw std::invalid_argument("experiment: rec_samples must be >= 0");
  for (const ScenarioSpec& s : scenarios) s.validate();
  settings.cv.validate();
  for (double a : settings.cv.alpha_grid)
    if (a < 0.06 - 1e-12 || a > 0.32 + 1e-12)
      throw std::invalid_argument("experiment: alpha grid must lie in [0.06, 0.32]");
  settings.admm.validate();
  settings.gep.alm.validate();
  if (settings.eps_hat && !(*settings.eps_hat > 0.0))
    throw std::invalid_argument("experiment: eps_hat must be positive");
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t scenario, int rep) {
  return derive_seed(derive_seed(base_seed, scenario), static_cast<std::uint64_t>(rep));
}

namespace {

using Clock = std::chrono::steady_clock;

struct Unit {
  std::size_t scenario;
  int rep;
};

std::vector<MetricsRecord> run_unit(const ExperimentConfig& cfg, const Unit& u) {
  const ScenarioSpec base = cfg.scenarios[u.scenario];
  ScenarioSpec spec = base;
  spec.seed = replication_seed(cfg.base_seed, u.scenario, u.rep);
  const Dataset d = generate(spec);

  std::optional<DiagnosticColumns> diag;
  double bound_per_lambda = std::numeric_limits<double>::quiet_NaN();
  if (cfg.diagnostics) {
    const SurrogatePair pair = make_surrogate(d.z, d.y, d.error_model);
    const CalibratedPair cal = calibrate(pair, cfg.settings.eps_hat);
    TheoryOptions opts;
    opts.rec_samples = cfg.rec_samples;
    opts.seed = derive_seed(spec.seed, 77);
    const TheoryReport tr = theory_report(d, pair, cal, 1.0, opts);
    DiagnosticColumns dc;
    dc.d_max = tr.d_max;
    dc.eps_tilde_inf = tr.eps_tilde_inf;
    dc.eps_ls_inf = tr.eps_ls_inf;
    dc.irrepresentable = tr.irrepresentable;
    dc.kappa_hat = tr.kappa_hat;
    if (tr.bound_thm2) bound_per_lambda = *tr.bound_thm2;
    diag = dc;
  }

  std::vector<MetricsRecord> out;
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    const Method m = cfg.methods[mi];
    MethodSettings settings = cfg.settings;
    settings.ncl.radius = d.beta_star.lpNorm<1>();

    const auto t0 = Clock::now();
    const MethodFit f = fit_method(d.z, d.y, d.error_model, m, settings,
                                   derive_seed(spec.seed, 1000 + static_cast<std::uint64_t>(m)));
    const auto t1 = Clock::now();

    MetricsRecord r;
    r.scenario = u.scenario;
    r.example = spec.example;
    r.error_kind = spec.error_kind();
    r.p = spec.p;
    r.s = spec.sparsity();
    r.n = spec.sample_size();
    r.alpha = spec.alpha;
    r.tau = spec.tau;
    r.sigma_noise = spec.sigma_noise;
    r.method = m;
    r.seed = spec.seed;
    r.rep_index = u.rep;
    r.alpha_star = f.alpha_star;
    r.lambda_used = f.lambda;
    r.converged = f.converged;
    r.error = f.error;
    r.wall_time_ms =
        cfg.record_timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
    if (f.error.empty()) {
      const RecoveryMetrics rm = metrics(f.beta, d.beta_star, cfg.metric_threshold);
      r.rmse_rel = rm.rmse_rel;
      r.nc = rm.nc;
      r.nic = rm.nic;
      r.nnz = rm.nnz;
    } else {
      r.rmse_rel = std::numeric_limits<double>::quiet_NaN();
    }
    if (diag) {
      r.diag = diag;
      if (std::isfinite(bound_per_lambda) && std::isfinite(f.lambda))
        r.diag->bound_thm2 = bound_per_lambda * f.lambda;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

void header_line(std::ostream& os, const ExperimentConfig& cfg, const char* role) {
  os << "# caznrls-csv v1 role=" << role << " config_hash=" << config_hash(cfg) << '\n';
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Unit> units;
  for (std::size_t s = 0; s < cfg.scenarios.size(); ++s)
    for (int r = 0; r < cfg.replications; ++r) units.push_back({s, cfg.first_replication + r});

  std::vector<std::vector<MetricsRecord>> slots(units.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= units.size()) return;
      try {
        slots[i] = run_unit(cfg, units[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int nthreads = std::min<int>(cfg.jobs, static_cast<int>(units.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult res;
  for (std::size_t s = 0; s < cfg.scenarios.size(); ++s)
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
      for (std::size_t i = 0; i < units.size(); ++i)
        if (units[i].scenario == s) res.records.push_back(slots[i][mi]);
  for (const auto& r : res.records)
    if (!r.converged) ++res.nonconverged;
  res.aggregates = aggregate(cfg, res.records);
  return res;
}

std::vector<AggregateRow> aggregate(const ExperimentConfig& cfg,
                                    const std::vector<MetricsRecord>& records) {
  std::vector<AggregateRow> out;
  for (std::size_t s = 0; s < cfg.scenarios.size(); ++s) {
    for (Method m : cfg.methods) {
      AggregateRow a;
      a.scenario = s;
      a.method = m;
      for (const auto& r : records) {
        if (r.method != m || r.scenario != s) continue;
        if (!r.converged) ++a.nonconverged;
        if (!std::isfinite(r.rmse_rel)) {
          ++a.failed;
          continue;
        }
        ++a.count;
        a.mean_rmse += r.rmse_rel;
        a.mean_nc += static_cast<double>(r.nc);
        a.mean_nic += static_cast<double>(r.nic);
        a.mean_nnz += static_cast<double>(r.nnz);
        a.mean_time_ms += r.wall_time_ms;
      }
      if (a.count > 0) {
        const double c = a.count;
        a.mean_rmse /= c;
        a.mean_nc /= c;
        a.mean_nic /= c;
        a.mean_nnz /= c;
        a.mean_time_ms /= c;
      } else {
        a.mean_rmse = a.mean_nc = a.mean_nic = a.mean_nnz = a.mean_time_ms =
            std::numeric_limits<double>::quiet_NaN();
      }
      out.push_back(a);
    }
  }
  return out;
}

void write_records_csv(std::ostream& os, const ExperimentConfig& cfg, const ExperimentResult& r) {
  header_line(os, cfg, "records");
  os << "example_id,error_model,p,s,n,alpha,tau,sigma_noise,method,seed,rep_index,rmse_rel,nc,"
        "nic,nnz,alpha_star,lambda_used,wall_time_ms,converged";
  if (cfg.diagnostics) os << ",d_max,eps_tilde_inf,eps_ls_inf,irrepresentable,kappa_hat_sampled,bound_thm2";
  os << ",error\n";
  for (const auto& x : r.records) {
    os << to_string(x.example) << ',' << to_string(x.error_kind) << ',' << x.p << ',' << x.s << ','
       << x.n << ',' << num(x.alpha) << ',' << num(x.tau) << ',' << num(x.sigma_noise) << ','
       << to_string(x.method) << ',' << x.seed << ',' << x.rep_index << ',' << num(x.rmse_rel)
       << ',' << x.nc << ',' << x.nic << ',' << x.nnz << ',' << num(x.alpha_star) << ','
       << num(x.lambda_used) << ',' << num(x.wall_time_ms) << ',' << (x.converged ? 1 : 0);
    if (cfg.diagnostics) {
      if (x.diag) {
        os << ',' << num(x.diag->d_max) << ',' << num(x.diag->eps_tilde_inf) << ','
           << num(x.diag->eps_ls_inf) << ',' << num(x.diag->irrepresentable) << ','
           << opt_num(x.diag->kappa_hat) << ',' << opt_num(x.diag->bound_thm2);
      } else {
        os << ",,,,,,";
      }
    }
    os << ',' << csv_escape(x.error) << '\n';
  }
}

void write_aggregate_csv(std::ostream& os, const ExperimentConfig& cfg, const ExperimentResult& r) {
  header_line(os, cfg, "aggregate");
  os << "example_id,error_model,p,s,n,alpha,tau,sigma_noise,method,count,failed,nonconverged,"
        "mean_rmse,mean_nc,mean_nic,mean_nnz,mean_time_ms,cv_tuning\n";
  for (const auto& a : r.aggregates) {
    const ScenarioSpec& s = cfg.scenarios[a.scenario];
    os << to_string(s.example) << ',' << to_string(s.error_kind()) << ',' << s.p << ','
       << s.sparsity() << ',' << s.sample_size() << ',' << num(s.alpha) << ',' << num(s.tau) << ','
       << num(s.sigma_noise) << ',' << to_string(a.method) << ',' << a.count << ',' << a.failed
       << ',' << a.nonconverged << ',' << num(a.mean_rmse) << ',' << num(a.mean_nc) << ','
       << num(a.mean_nic) << ',' << num(a.mean_nnz) << ',' << num(a.mean_time_ms) << ','
       << (a.method == Method::ncl ? "none" : "per_method") << '\n';
  }
}

void write_plotdata_csv(std::ostream& os, const ExperimentConfig& cfg, const ExperimentResult& r) {
  header_line(os, cfg, "plotdata");
  os << "example_id,error_model,p,tau,sigma_noise,method,alpha,mean_rmse,mean_nc,mean_nic,"
        "mean_time\n";
  // Curves are keyed by everything except alpha and sorted by alpha.
  using Key = std::pair<std::size_t, int>;
  std::map<Key, std::vector<const AggregateRow*>> curves;
  std::map<std::tuple<int, int, Index, double, double>, std::size_t> family;
  for (const auto& a : r.aggregates) {
    const ScenarioSpec& s = cfg.scenarios[a.scenario];
    const auto fam = std::make_tuple(static_cast<int>(s.example), static_cast<int>(s.error_kind()),
                                     s.p, s.tau, s.sigma_noise);
    const std::size_t id = family.emplace(fam, family.size()).first->second;
    curves[Key{id, static_cast<int>(a.method)}].push_back(&a);
  }
  for (auto& [key, rows] : curves) {
    std::stable_sort(rows.begin(), rows.end(), [&](const AggregateRow* x, const AggregateRow* y) {
      return cfg.scenarios[x->scenario].alpha < cfg.scenarios[y->scenario].alpha;
    });
    for (const AggregateRow* a : rows) {
      const ScenarioSpec& s = cfg.scenarios[a->scenario];
      os << to_string(s.example) << ',' << to_string(s.error_kind()) << ',' << s.p << ','
         << num(s.tau) << ',' << num(s.sigma_noise) << ',' << to_string(a->method) << ','
         << num(s.alpha) << ',' << num(a->mean_rmse) << ',' << num(a->mean_nc) << ','
         << num(a->mean_nic) << ',' << num(a->mean_time_ms) << '\n';
    }
  }
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& r) {
  auto emit = [&](const std::string& path, auto writer) {
    if (path.empty()) return;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    writer(os, cfg, r);
    if (!os) throw std::runtime_error("write to '" + path + "' failed");
  };
  emit(cfg.output.records, write_records_csv);
  emit(cfg.output.aggregate, write_aggregate_csv);
  emit(cfg.output.plotdata, write_plotdata_csv);
}

ExperimentConfig table1_preset(int replications) {
  ExperimentConfig cfg;
  const std::pair<ErrorKind, double> cols[] = {
      {ErrorKind::additive, 1.0}, {ErrorKind::multiplicative, 0.8}, {ErrorKind::missing, 0.5}};
  for (const auto& [kind, tau] : cols) {
    ScenarioSpec s;
    s.example = ExampleId::Fixed52;
    s.p = 250;
    s.n = 100;
    s.s = 3;
    s.tau = tau;
    s.sigma_noise = 0.5;
    s.corruption = kind;
    cfg.scenarios.push_back(s);
  }
  cfg.replications = replications;
  return cfg;
}

}  // namespace caznrls
