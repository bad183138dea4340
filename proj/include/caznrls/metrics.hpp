#pragma once

#include "caznrls/linalg.hpp"

namespace caznrls {

struct RecoveryMetrics {
  double rmse_rel = 0.0;  // ||beta_f - beta*|| / ||beta*||
  Index nc = 0;           // signs on supp(beta*) identified correctly
  Index nic = 0;          // nnz - nc
  Index nnz = 0;
};

// Entries with |x| <= threshold have sign 0. Throws for beta_star == 0 or a
// size mismatch.
RecoveryMetrics metrics(const Vector& beta_f, const Vector& beta_star, double threshold = 1e-8);

}  // namespace caznrls
