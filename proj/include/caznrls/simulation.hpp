#pragma once

#include "caznrls/linalg.hpp"
#include "caznrls/surrogate.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace caznrls {

using Rng = std::mt19937_64;

// Simulated scenarios. Ex1..Ex8 place the support at random; Fixed52 uses
// beta* = (3, 1.5, 0, 0, 2, 0, ...) with an AR(1) 0.5 design.
enum class ExampleId { Ex1, Ex2, Ex3, Ex4, Ex5, Ex6, Ex7, Ex8, Fixed52 };
enum class ErrorKind { additive, multiplicative, missing };
enum class BetaMode { random_normal, fixed_52 };

std::string to_string(ExampleId id);
std::string to_string(ErrorKind kind);
ExampleId parse_example(const std::string& s);
ErrorKind parse_error_kind(const std::string& s);

// Error model implied by the example; Fixed52 has none and must be told.
std::optional<ErrorKind> default_error_kind(ExampleId id);

struct ScenarioSpec {
  ExampleId example = ExampleId::Ex2;
  Index p = 100;
  std::optional<Index> s;         // default floor(0.5 sqrt p), or 3 for Fixed52
  double alpha = 5.0;             // n = floor(alpha s ln p) unless n is given
  std::optional<Index> n;         // explicit sample size (Fixed52 default 100)
  double tau = 1.0;
  double sigma_noise = 0.5;
  std::optional<ErrorKind> corruption;  // required for Fixed52
  bool normalize = false;
  std::uint64_t seed = 1;

  Index sparsity() const;
  Index sample_size() const;
  ErrorKind error_kind() const;
  void validate() const;
};

struct Dataset {
  Matrix x;  // clean design
  Matrix z;  // observed design
  Vector y;
  Vector beta_star;
  std::vector<Index> support_star;
  ErrorModel error_model;
};

// splitmix64-based seed mixing; replication r of a run uses derive_seed(base, r).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

struct BetaDraw {
  Vector beta_star;
  std::vector<Index> support_star;
};

BetaDraw gen_beta(Index p, Index s, BetaMode mode, Rng& rng);

Matrix gen_design(const ScenarioSpec& spec, Index n, const std::vector<Index>& support, Rng& rng);

struct Corruption {
  Matrix z;
  ErrorModel error_model;
};

Corruption corrupt(const Matrix& x, ErrorKind kind, double tau, Rng& rng);

Vector gen_response(const Matrix& x, const Vector& beta_star, double sigma_noise, Rng& rng);

// Full dataset for (spec, spec.seed); bitwise reproducible.
Dataset generate(const ScenarioSpec& spec);

// Exact log-normal moment model: mu = e^{tau^2/2}, second moments
// e^{tau^2 (1 + [i == j])}.
MultiplicativeError lognormal_error_model(Index p, double tau);

}  // namespace caznrls
