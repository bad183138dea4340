#pragma once

#include "caznrls/baselines.hpp"
#include "caznrls/calibration.hpp"
#include "caznrls/gep_msgra.hpp"
#include "caznrls/simulation.hpp"
#include "caznrls/surrogate.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace caznrls {

enum class Method { caznrls, cocolasso, ncl };

std::string to_string(Method m);
Method parse_method(const std::string& s);

// Matrix in the held-out score 1/2 b^T S_v b - <xi_v, b>: the fold's raw
// surrogate, or its Frobenius-nearest matrix with eigenvalues >= eps_hat.
enum class CvScoreMatrix { surrogate, calibrated };

struct CvConfig {
  int folds = 5;
  CvScoreMatrix score_matrix = CvScoreMatrix::surrogate;
  std::vector<double> alpha_grid = default_alpha_grid();
  double lambda_floor = 0.01;

  // 0.06, 0.08, ..., 0.32
  static std::vector<double> default_alpha_grid();
  void validate() const;
};

struct MethodSettings {
  GepConfig gep;                  // lambda is overwritten by the tuning step
  AdmmParams admm;
  NclParams ncl;                  // radius is set per dataset
  std::optional<double> eps_hat;  // empty means the default floor of each calibration
  CvConfig cv;
};

// lambda = max(floor, alpha ||xi_hat||_inf), which equals
// max(floor, alpha / n ||Z~^T y~||_inf) for any pair with Z~^T y~ = n xi_hat.
double lambda_from_alpha(double alpha, const Vector& xi_hat, double floor);

struct CvResult {
  double alpha_star = 0.0;
  double lambda = 0.0;              // from the full-data pair
  std::vector<double> mean_scores;  // one per grid value
};

// Corrected K-fold cross-validation for CaZnRLS or CoCoLasso. Each fold
// fits on the surrogate of the training rows and scores the held-out fold's
// own surrogate with 1/2 b^T S_v b - <xi_v, b>. Rows are assigned to folds by
// a permutation drawn from `seed`. For CoCoLasso the fold ADMM runs start
// from `full_admm` when given (the full-data ADMM state), otherwise from a
// full-data run made here.
CvResult corrected_cv(const Matrix& z, const Vector& y, const ErrorModel& model, Method method,
                      const MethodSettings& settings, std::uint64_t seed,
                      const AdmmState* full_admm = nullptr);

struct MethodFit {
  Vector beta;
  double alpha_star = 0.0;  // NaN for NCL
  double lambda = 0.0;      // NaN for NCL
  bool converged = false;
  std::string error;        // non-empty if the fit threw
};

// Tune (for CaZnRLS and CoCoLasso) and fit one method. NCL needs
// settings.ncl.radius to be set by the caller.
MethodFit fit_method(const Matrix& z, const Vector& y, const ErrorModel& model, Method method,
                     const MethodSettings& settings, std::uint64_t seed);

}  // namespace caznrls
