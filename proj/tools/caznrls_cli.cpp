#include "caznrls/calibration.hpp"
#include "caznrls/config.hpp"
#include "caznrls/cross_validation.hpp"
#include "caznrls/dataset_io.hpp"
#include "caznrls/diagnostics.hpp"
#include "caznrls/experiment.hpp"
#include "caznrls/metrics.hpp"
#include "caznrls/simulation.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace caznrls;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kPartial = 2;

struct ScenarioFlags {
  std::string example = "Ex2";
  Index p = 100;
  std::optional<Index> s;
  std::optional<Index> n;
  double alpha = 5.0;
  double tau = 1.0;
  double sigma = 0.5;
  std::string corruption;
  bool normalize = false;
  std::uint64_t seed = 1;

  void attach(CLI::App* app) {
    app->add_option("--example", example, "Ex1..Ex8 or Fixed52");
    app->add_option("--p", p, "dimension");
    app->add_option("--s", s, "sparsity (default floor(0.5 sqrt p), 3 for Fixed52)");
    app->add_option("--n", n, "explicit sample size");
    app->add_option("--alpha", alpha, "sample-size multiplier, n = floor(alpha s ln p)");
    app->add_option("--tau", tau, "corruption level");
    app->add_option("--sigma", sigma, "response noise standard deviation");
    app->add_option("--corruption", corruption, "additive|multiplicative|missing (needed for Fixed52)");
    app->add_flag("--normalize", normalize, "rescale design columns to norm sqrt(n)");
    app->add_option("--seed", seed, "random seed");
  }

  ScenarioSpec spec() const {
    ScenarioSpec sp;
    sp.example = parse_example(example);
    sp.p = p;
    sp.s = s;
    sp.n = n;
    sp.alpha = alpha;
    sp.tau = tau;
    sp.sigma_noise = sigma;
    if (!corruption.empty()) sp.corruption = parse_error_kind(corruption);
    sp.normalize = normalize;
    sp.seed = seed;
    sp.validate();
    return sp;
  }
};

void print_vector_csv(std::ostream& os, const Vector& b) {
  os << "index,beta\n";
  char buf[40];
  for (Index i = 0; i < b.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", b(i));
    os << i << ',' << buf << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibrated zero-norm regularized least squares for errors-in-variables regression"};
  app.require_subcommand(1);

  // simulate
  ScenarioFlags sim_flags;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "generate a dataset file");
  sim_flags.attach(sim);
  sim->add_option("--out", sim_out, "output dataset file")->required();

  // fit
  std::string fit_data, fit_method_name = "caznrls", fit_out;
  std::optional<double> fit_lambda, fit_radius, fit_eps;
  std::uint64_t fit_seed = 1;
  auto* fitc = app.add_subcommand("fit", "fit one method on a dataset file");
  fitc->add_option("--data", fit_data, "dataset file")->required();
  fitc->add_option("--method", fit_method_name, "caznrls|cocolasso|ncl");
  fitc->add_option("--lambda", fit_lambda, "fixed lambda (skips cross-validation)");
  fitc->add_option("--radius", fit_radius, "NCL l1 radius (default ||beta*||_1 from the file)");
  fitc->add_option("--eps-hat", fit_eps, "eigenvalue floor (default 1e-2 max(1, theta_1))");
  fitc->add_option("--seed", fit_seed, "fold assignment seed");
  fitc->add_option("--out", fit_out, "coefficient CSV (default stdout)");

  // cv
  std::string cv_data, cv_method_name = "caznrls";
  std::uint64_t cv_seed = 1;
  auto* cvc = app.add_subcommand("cv", "corrected cross-validation only");
  cvc->add_option("--data", cv_data, "dataset file")->required();
  cvc->add_option("--method", cv_method_name, "caznrls|cocolasso");
  cvc->add_option("--seed", cv_seed, "fold assignment seed");

  // diagnose
  std::string diag_data;
  ScenarioFlags diag_flags;
  double diag_lambda = 0.1;
  int diag_rec = 200;
  auto* diagc = app.add_subcommand("diagnose", "theory quantities on a simulated instance");
  diagc->add_option("--data", diag_data, "dataset file with [X] and [beta_star] blocks");
  diag_flags.attach(diagc);
  diagc->add_option("--lambda", diag_lambda, "lambda used in the error bound");
  diagc->add_option("--rec-samples", diag_rec, "cone samples for the REC estimate");

  // experiment
  std::string exp_config, exp_preset, exp_out = ".", exp_methods;
  ScenarioFlags exp_flags;
  std::vector<double> exp_alphas;
  std::optional<int> exp_reps, exp_jobs, exp_first;
  std::optional<std::uint64_t> exp_seed;
  bool exp_diag = false, exp_no_timing = false;
  auto* expc = app.add_subcommand("experiment", "replicated simulation sweep");
  expc->add_option("--config", exp_config, "JSON configuration file");
  expc->add_option("--preset", exp_preset, "built-in configuration: table1");
  exp_flags.attach(expc);
  expc->add_option("--alphas", exp_alphas, "sweep of sample-size multipliers")->delimiter(',');
  expc->add_option("--reps", exp_reps, "replications");
  expc->add_option("--first-rep", exp_first, "index of the first replication");
  expc->add_option("--methods", exp_methods, "comma-separated subset of caznrls,cocolasso,ncl");
  expc->add_option("--base-seed", exp_seed, "base seed for per-replication seeds");
  expc->add_option("--jobs", exp_jobs, "worker threads");
  expc->add_flag("--diagnostics", exp_diag, "append theory columns to the records");
  expc->add_flag("--no-timing", exp_no_timing, "write 0 for wall times");
  expc->add_option("--out", exp_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*sim) {
      const ScenarioSpec spec = sim_flags.spec();
      write_dataset(sim_out, generate(spec));
      std::cout << "wrote " << sim_out << " (n=" << spec.sample_size() << ", p=" << spec.p << ")\n";
      return kOk;
    }

    if (*fitc) {
      const Dataset d = read_dataset(fit_data);
      const Method m = parse_method(fit_method_name);
      MethodSettings settings = experiment_settings();
      settings.eps_hat = fit_eps;
      if (m == Method::ncl) {
        if (fit_radius) settings.ncl.radius = *fit_radius;
        else if (d.beta_star.size() > 0) settings.ncl.radius = d.beta_star.lpNorm<1>();
        else throw std::invalid_argument("ncl needs --radius when the file has no beta_star");
      }
      MethodFit f;
      if (fit_lambda && m != Method::ncl) {
        const SurrogatePair pair = make_surrogate(d.z, d.y, d.error_model);
        if (m == Method::caznrls) {
          GepConfig gep = settings.gep;
          gep.lambda = *fit_lambda;
          const FitResult r = fit(calibrate(pair, fit_eps), gep);
          f.beta = r.beta_final;
          f.converged = r.all_inner_converged;
        } else {
          const double eps = fit_eps ? *fit_eps : default_eps_hat(sym_eig(pair.sigma_hat).values(0));
          const LassoFit lf = cocolasso_solve(coco_calibrate(pair, eps, settings.admm), *fit_lambda);
          f.beta = lf.beta;
          f.converged = lf.converged;
        }
        f.lambda = *fit_lambda;
        f.alpha_star = std::nan("");
      } else {
        f = fit_method(d.z, d.y, d.error_model, m, settings, fit_seed);
        if (!f.error.empty()) throw std::runtime_error(f.error);
      }
      std::cerr << "method=" << to_string(m) << " lambda=" << f.lambda
                << " alpha_star=" << f.alpha_star << " converged=" << f.converged << '\n';
      if (d.beta_star.size() > 0 && d.beta_star.norm() > 0.0) {
        const RecoveryMetrics rm = metrics(f.beta, d.beta_star);
        std::cerr << "rmse_rel=" << rm.rmse_rel << " nc=" << rm.nc << " nic=" << rm.nic
                  << " nnz=" << rm.nnz << '\n';
      }
      if (fit_out.empty()) {
        print_vector_csv(std::cout, f.beta);
      } else {
        std::ofstream os(fit_out);
        if (!os) throw std::runtime_error("cannot open '" + fit_out + "'");
        print_vector_csv(os, f.beta);
      }
      return f.converged ? kOk : kPartial;
    }

    if (*cvc) {
      const Dataset d = read_dataset(cv_data);
      MethodSettings settings = experiment_settings();
      const CvResult r = corrected_cv(d.z, d.y, d.error_model, parse_method(cv_method_name),
                                      settings, cv_seed);
      std::cout << "alpha,mean_score\n";
      for (std::size_t g = 0; g < r.mean_scores.size(); ++g)
        std::cout << settings.cv.alpha_grid[g] << ',' << r.mean_scores[g] << '\n';
      std::cout << "# alpha_star=" << r.alpha_star << " lambda=" << r.lambda << '\n';
      return kOk;
    }

    if (*diagc) {
      const Dataset d = diag_data.empty() ? generate(diag_flags.spec()) : read_dataset(diag_data);
      const SurrogatePair pair = make_surrogate(d.z, d.y, d.error_model);
      const CalibratedPair cal = calibrate(pair);
      TheoryOptions opts;
      opts.rec_samples = diag_rec;
      const TheoryReport r = theory_report(d, pair, cal, diag_lambda, opts);
      std::cout << "d_max=" << r.d_max << "\neps_tilde_inf=" << r.eps_tilde_inf
                << "\neps_ls_inf=" << r.eps_ls_inf << "\neps_ls_support_inf=" << r.eps_ls_support_inf
                << "\ndagger_residual=" << r.dagger_residual
                << "\nirrepresentable=" << r.irrepresentable << '\n';
      if (r.kappa_hat)
        std::cout << "kappa_hat_sampled=" << *r.kappa_hat
                  << "  (sampled upper estimate, not a certificate)\n";
      std::cout << "bound_thm2=" << (r.bound_thm2 ? std::to_string(*r.bound_thm2) : "absent") << '\n';
      return kOk;
    }

    if (*expc) {
      ExperimentConfig cfg;
      if (!exp_config.empty()) {
        cfg = load_experiment_config(exp_config);
      } else if (exp_preset == "table1") {
        cfg = table1_preset(100);
      } else if (!exp_preset.empty()) {
        throw ConfigError("unknown preset '" + exp_preset + "'");
      } else {
        const ScenarioSpec base = exp_flags.spec();
        if (exp_alphas.empty()) exp_alphas = {base.alpha};
        for (double a : exp_alphas) {
          ScenarioSpec s = base;
          s.alpha = a;
          cfg.scenarios.push_back(s);
        }
        cfg.base_seed = exp_flags.seed;
      }
      if (exp_reps) cfg.replications = *exp_reps;
      if (exp_first) cfg.first_replication = *exp_first;
      if (exp_seed) cfg.base_seed = *exp_seed;
      if (exp_jobs) cfg.jobs = *exp_jobs;
      if (exp_diag) cfg.diagnostics = true;
      if (exp_no_timing) cfg.record_timing = false;
      if (!exp_methods.empty()) {
        cfg.methods.clear();
        std::size_t start = 0;
        while (start <= exp_methods.size()) {
          const std::size_t comma = exp_methods.find(',', start);
          const std::string tok = exp_methods.substr(start, comma - start);
          if (!tok.empty()) cfg.methods.push_back(parse_method(tok));
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
      }
      std::filesystem::create_directories(exp_out);
      const std::filesystem::path dir(exp_out);
      if (cfg.output.records.empty()) cfg.output.records = (dir / "records.csv").string();
      if (cfg.output.aggregate.empty()) cfg.output.aggregate = (dir / "aggregate.csv").string();
      if (cfg.output.plotdata.empty()) cfg.output.plotdata = (dir / "plotdata.csv").string();
      try {
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }

      const ExperimentResult res = run_experiment(cfg);
      write_outputs(cfg, res);
      write_aggregate_csv(std::cout, cfg, res);
      if (res.nonconverged > 0) {
        std::cerr << res.nonconverged << " record(s) did not converge\n";
        return kPartial;
      }
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPartial;
  }
  return kOk;
}
