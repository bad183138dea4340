#pragma once

#include "caznrls/linalg.hpp"

namespace caznrls {

// phi(t) = (a-1)/(a+1) t^2 + 2/(a+1) t, a > 1.
double phi(double t, double a);

// phi restricted to [0, 1]; +infinity outside.
double psi(double t, double a);

// Convex conjugate of psi.
double psi_conjugate(double omega, double a);

// lambda [rho |t| - psi*(rho |t|)] with lambda = (a+1) gamma^2 / 2 and
// rho = 2 / ((a+1) gamma). Equals the SCAD penalty with knots gamma, a*gamma.
double scad_penalty_via_conjugate(double t, double gamma, double a);

// Closed-form minimizer of phi(w) - rho w |beta_i| over w in [0, 1].
double w_update(double beta_i, double rho, double a);
Vector w_update(const Vector& beta, double rho, double a);

// Stage penalty schedule. k is 1-based.
//   k = 1:     max(1, 5 / (3 ||beta||_inf))
//   k = 2, 3:  min(2 rho_prev, cap / ||beta||_inf)
//   k > 3:     rho_prev
// A zero beta leaves rho_prev unchanged.
double rho_schedule(int k, const Vector& beta, double rho_prev, double cap);

}  // namespace caznrls
