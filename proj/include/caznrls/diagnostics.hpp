#pragma once

#include "caznrls/calibration.hpp"
#include "caznrls/linalg.hpp"
#include "caznrls/simulation.hpp"
#include "caznrls/surrogate.hpp"

#include <optional>
#include <vector>

namespace caznrls {

// Theory quantities on a simulated instance. Needs the clean design and
// beta*, so only the simulation path uses it.
struct TheoryReport {
  double d_max = 0.0;             // ||sigma_hat - X^T X / n||_max
  Vector eps_tilde;               // xi_hat - sigma_tilde beta*
  double eps_tilde_inf = 0.0;
  Vector beta_ls;                 // oracle LS restricted to supp(beta*)
  double eps_ls_inf = 0.0;        // ||sigma_tilde beta_ls - xi_hat||_inf
  double eps_ls_support_inf = 0.0;  // same, restricted to supp(beta*); ~0
  double dagger_residual = 0.0;   // ||(beta_ls - beta*)_S - sigma_tilde_SS^{-1} eps_tilde_S||_inf
  double irrepresentable = 0.0;   // ||Sigma_{S^c S} Sigma_SS^{-1}||_inf on the clean Gram
  std::optional<double> kappa_hat;  // sampled REC value; an upper estimate, not a certificate
  std::optional<double> bound_thm2;  // absent when kappa_hat <= 24 s d_max
};

struct TheoryOptions {
  int rec_samples = 0;  // 0 skips the REC estimate
  std::uint64_t seed = 1;
};

TheoryReport theory_report(const Dataset& dataset, const SurrogatePair& pair,
                           const CalibratedPair& cal, double lambda,
                           const TheoryOptions& opts = {});

// Minimum of b^T sigma b / ||b||^2 over sampled directions of the cone
//   union over S containing `support`, |S| <= floor(1.5 s), of
//   {b : ||b_{S^c}||_1 <= 3 ||b_S||_1}.
// Every sample lies in the cone, so the result is an upper estimate of the
// true restricted eigenvalue. Each visited S also contributes the exact
// minimum eigenvalue of sigma_SS.
double rec_estimate(const Matrix& sigma, const std::vector<Index>& support, Index s,
                    int samples, Rng& rng);

struct TrackedSets {
  std::vector<Index> f;       // {i : |b_i| - |b*_i| >= 1 / rho}
  std::vector<Index> lambda;  // {i : |b*_i| <= 4a / ((a + 1) rho)}
};

TrackedSets track_sets(const Vector& beta_k, const Vector& beta_star, double rho, double a);

// ||Sigma_{S^c S} Sigma_SS^{-1}||_inf (max absolute row sum).
double irrepresentable_number(const Matrix& sigma, const std::vector<Index>& support);

}  // namespace caznrls
