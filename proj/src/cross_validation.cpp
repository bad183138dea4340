#include "caznrls/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace caznrls {

std::string to_string(Method m) {
  switch (m) {
    case Method::caznrls: return "caznrls";
    case Method::cocolasso: return "cocolasso";
    case Method::ncl: return "ncl";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "caznrls") return Method::caznrls;
  if (s == "cocolasso" || s == "coco") return Method::cocolasso;
  if (s == "ncl") return Method::ncl;
  throw std::invalid_argument("unknown method '" + s + "'");
}

std::vector<double> CvConfig::default_alpha_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 13; ++i) g.push_back(0.06 + 0.02 * i);
  return g;
}

void CvConfig::validate() const {
  if (folds < 2) throw std::invalid_argument("cv: need at least 2 folds");
  if (alpha_grid.empty()) throw std::invalid_argument("cv: alpha grid is empty");
  for (double a : alpha_grid)
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("cv: alpha values must be positive");
  if (!(lambda_floor >= 0.0)) throw std::invalid_argument("cv: lambda floor must be >= 0");
}

double lambda_from_alpha(double alpha, const Vector& xi_hat, double floor) {
  return std::max(floor, alpha * xi_hat.cwiseAbs().maxCoeff());
}

namespace {

Matrix take_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

Vector take_rows(const Vector& v, const std::vector<Index>& rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Index>(i)) = v(rows[i]);
  return out;
}

double corrected_loss(const SurrogatePair& held, const Vector& b) {
  return 0.5 * b.dot(held.sigma_hat * b) - held.xi_hat.dot(b);
}

double eps_for(const MethodSettings& s, const Vector& eigvals) {
  return s.eps_hat ? *s.eps_hat : default_eps_hat(eigvals(0));
}

}  // namespace

CvResult corrected_cv(const Matrix& z, const Vector& y, const ErrorModel& model, Method method,
                      const MethodSettings& settings, std::uint64_t seed,
                      const AdmmState* full_admm_in) {
  const CvConfig& cv = settings.cv;
  cv.validate();
  if (method == Method::ncl) throw std::invalid_argument("cv: NCL has no lambda to tune");
  const Index n = z.rows();
  if (n / cv.folds < 2) throw std::invalid_argument("cv: folds would have fewer than 2 rows");

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  const std::size_t grid = cv.alpha_grid.size();
  std::vector<double> total(grid, 0.0);

  const SurrogatePair full = make_surrogate(z, y, model);
  std::optional<AdmmState> full_admm;
  if (full_admm_in) {
    full_admm = *full_admm_in;
  } else if (method == Method::cocolasso && grid > 1) {
    const SymEigen eig = sym_eig(full.sigma_hat);
    full_admm = nearest_pd_maxnorm(full.sigma_hat, eps_for(settings, eig.values), settings.admm).state;
  }

  for (int v = 0; grid > 1 && v < cv.folds; ++v) {
    std::vector<Index> train, test;
    for (std::size_t i = 0; i < perm.size(); ++i)
      (static_cast<int>(i % static_cast<std::size_t>(cv.folds)) == v ? test : train).push_back(perm[i]);
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    const Matrix z_tr = take_rows(z, train);
    const Vector y_tr = take_rows(y, train);
    const SurrogatePair tr = make_surrogate(z_tr, y_tr, model);
    SurrogatePair te = make_surrogate(take_rows(z, test), take_rows(y, test), model);
    if (cv.score_matrix == CvScoreMatrix::calibrated) {
      const SymEigen eig = sym_eig(te.sigma_hat);
      const double floor = eps_for(settings, eig.values);
      te.sigma_hat = spectral_apply(eig, [floor](double t) { return std::max(t, floor); });
    }

    if (method == Method::caznrls) {
      const CalibratedPair cal = calibrate(tr, settings.eps_hat);
      for (std::size_t g = 0; g < grid; ++g) {
        GepConfig gep = settings.gep;
        gep.lambda = lambda_from_alpha(cv.alpha_grid[g], tr.xi_hat, cv.lambda_floor);
        total[g] += corrected_loss(te, fit(cal, gep).beta_final);
      }
    } else {
      const SymEigen eig = sym_eig(tr.sigma_hat);
      const CocoPair coco = coco_calibrate(tr, eps_for(settings, eig.values), settings.admm, full_admm);
      std::optional<WeightedLassoSolution> warm;
      for (std::size_t g = 0; g < grid; ++g) {
        const double lambda = lambda_from_alpha(cv.alpha_grid[g], tr.xi_hat, cv.lambda_floor);
        WeightedLassoProblem prob{coco.z_bar, coco.y_bar,
                                  Vector::Constant(coco.z_bar.cols(), static_cast<double>(coco.n) * lambda)};
        WeightedLassoSolution sol = solve(prob, settings.gep.alm, warm);
        total[g] += corrected_loss(te, sol.beta);
        warm = std::move(sol);
      }
    }
  }

  CvResult out;
  out.mean_scores.resize(grid);
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid; ++g) {
    out.mean_scores[g] = total[g] / cv.folds;
    if (out.mean_scores[g] < out.mean_scores[best]) best = g;
  }
  out.alpha_star = cv.alpha_grid[best];
  out.lambda = lambda_from_alpha(out.alpha_star, full.xi_hat, cv.lambda_floor);
  return out;
}

MethodFit fit_method(const Matrix& z, const Vector& y, const ErrorModel& model, Method method,
                     const MethodSettings& settings, std::uint64_t seed) {
  MethodFit out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    const SurrogatePair pair = make_surrogate(z, y, model);
    switch (method) {
      case Method::caznrls: {
        const CvResult cv = corrected_cv(z, y, model, method, settings, seed);
        const CalibratedPair cal = calibrate(pair, settings.eps_hat);
        GepConfig gep = settings.gep;
        gep.lambda = cv.lambda;
        const FitResult fr = fit(cal, gep);
        out.beta = fr.beta_final;
        out.converged = fr.all_inner_converged;
        out.alpha_star = cv.alpha_star;
        out.lambda = cv.lambda;
        break;
      }
      case Method::cocolasso: {
        const SymEigen eig = sym_eig(pair.sigma_hat);
        const double eps = eps_for(settings, eig.values);
        MaxNormProjection mp = nearest_pd_maxnorm(pair.sigma_hat, eps, settings.admm);
        const CvResult cv = corrected_cv(z, y, model, method, settings, seed, &mp.state);
        const CocoPair coco = coco_from_projection(pair, std::move(mp));
        const LassoFit lf = cocolasso_solve(coco, cv.lambda, settings.gep.alm);
        out.beta = lf.beta;
        out.converged = lf.converged && coco.admm.converged;
        out.alpha_star = cv.alpha_star;
        out.lambda = cv.lambda;
        break;
      }
      case Method::ncl: {
        const NclResult r = ncl_fit(pair, settings.ncl);
        out.beta = r.beta;
        out.converged = r.converged;
        out.alpha_star = nan;
        out.lambda = nan;
        break;
      }
    }
  } catch (const std::exception& e) {
    out.beta = Vector::Constant(z.cols(), nan);
    out.converged = false;
    out.alpha_star = nan;
    out.lambda = nan;
    out.error = e.what();
  }
  return out;
}

}  // namespace caznrls
