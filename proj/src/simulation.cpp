#include "caznrls/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace caznrls {

std::string to_string(ExampleId id) {
  switch (id) {
    case ExampleId::Ex1: return "Ex1";
    case ExampleId::Ex2: return "Ex2";
    case ExampleId::Ex3: return "Ex3";
    case ExampleId::Ex4: return "Ex4";
    case ExampleId::Ex5: return "Ex5";
    case ExampleId::Ex6: return "Ex6";
    case ExampleId::Ex7: return "Ex7";
    case ExampleId::Ex8: return "Ex8";
    case ExampleId::Fixed52: return "Fixed52";
  }
  return "?";
}

std::string to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::additive: return "additive";
    case ErrorKind::multiplicative: return "multiplicative";
    case ErrorKind::missing: return "missing";
  }
  return "?";
}

ExampleId parse_example(const std::string& s) {
  static const std::pair<const char*, ExampleId> table[] = {
      {"Ex1", ExampleId::Ex1}, {"Ex2", ExampleId::Ex2}, {"Ex3", ExampleId::Ex3},
      {"Ex4", ExampleId::Ex4}, {"Ex5", ExampleId::Ex5}, {"Ex6", ExampleId::Ex6},
      {"Ex7", ExampleId::Ex7}, {"Ex8", ExampleId::Ex8}, {"Fixed52", ExampleId::Fixed52}};
  for (const auto& [name, id] : table) {
    if (s == name) return id;
    // accept "1".."8" and "ex2" style shorthands
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
    if (s == lower || (lower.size() == 3 && s == lower.substr(2))) return id;
  }
  if (s == "fixed52" || s == "52") return ExampleId::Fixed52;
  throw std::invalid_argument("unknown example id '" + s + "'");
}

ErrorKind parse_error_kind(const std::string& s) {
  if (s == "additive") return ErrorKind::additive;
  if (s == "multiplicative") return ErrorKind::multiplicative;
  if (s == "missing") return ErrorKind::missing;
  throw std::invalid_argument("unknown error model '" + s + "'");
}

std::optional<ErrorKind> default_error_kind(ExampleId id) {
  switch (id) {
    case ExampleId::Ex1:
    case ExampleId::Ex2:
    case ExampleId::Ex3:
    case ExampleId::Ex8: return ErrorKind::additive;
    case ExampleId::Ex4:
    case ExampleId::Ex5: return ErrorKind::multiplicative;
    case ExampleId::Ex6:
    case ExampleId::Ex7: return ErrorKind::missing;
    case ExampleId::Fixed52: return std::nullopt;
  }
  return std::nullopt;
}

Index ScenarioSpec::sparsity() const {
  if (s) return *s;
  if (example == ExampleId::Fixed52) return 3;
  return static_cast<Index>(std::floor(0.5 * std::sqrt(static_cast<double>(p))));
}

Index ScenarioSpec::sample_size() const {
  if (n) return *n;
  if (example == ExampleId::Fixed52) return 100;
  return static_cast<Index>(
      std::floor(alpha * static_cast<double>(sparsity()) * std::log(static_cast<double>(p))));
}

ErrorKind ScenarioSpec::error_kind() const {
  if (corruption) return *corruption;
  if (auto k = default_error_kind(example)) return *k;
  throw std::invalid_argument("scenario " + to_string(example) +
                              " needs an explicit corruption model");
}

void ScenarioSpec::validate() const {
  if (p < 4) throw std::invalid_argument("scenario: p must be >= 4");
  const Index sp = sparsity();
  if (sp < 1 || sp > p) throw std::invalid_argument("scenario: need 1 <= s <= p");
  if (example == ExampleId::Fixed52 && (p < 5 || sp != 3))
    throw std::invalid_argument("scenario: Fixed52 needs p >= 5 and s = 3");
  if (sample_size() < 1) throw std::invalid_argument("scenario: sample size is zero");
  if (!(sigma_noise >= 0.0)) throw std::invalid_argument("scenario: sigma must be >= 0");
  if (!(tau >= 0.0)) throw std::invalid_argument("scenario: tau must be >= 0");
  if (error_kind() == ErrorKind::missing && !(tau < 1.0))
    throw std::invalid_argument("scenario: missing-data tau must be < 1");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(base) ^ (stream * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

BetaDraw gen_beta(Index p, Index s, BetaMode mode, Rng& rng) {
  BetaDraw out;
  out.beta_star = Vector::Zero(p);
  if (mode == BetaMode::fixed_52) {
    if (p < 5) throw std::invalid_argument("gen_beta: fixed support needs p >= 5");
    out.beta_star(0) = 3.0;
    out.beta_star(1) = 1.5;
    out.beta_star(4) = 2.0;
    out.support_star = {0, 1, 4};
    return out;
  }
  if (s < 0 || s > p) throw std::invalid_argument("gen_beta: need s <= p");
  // Partial Fisher-Yates for a uniform s-subset.
  std::vector<Index> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < s; ++i) {
    std::uniform_int_distribution<Index> pick(i, p - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  out.support_star.assign(idx.begin(), idx.begin() + s);
  std::sort(out.support_star.begin(), out.support_star.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index j : out.support_star) out.beta_star(j) = normal(rng);
  return out;
}

namespace {

double laplace_unit_variance(Rng& rng) {
  // scale b = 1/sqrt(2) gives variance 2 b^2 = 1
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  double u = unif(rng);
  while (std::abs(u) >= 0.5) u = unif(rng);
  const double b = 1.0 / std::sqrt(2.0);
  return -b * (u < 0 ? -1.0 : 1.0) * std::log1p(-2.0 * std::abs(u));
}

}  // namespace

Matrix gen_design(const ScenarioSpec& spec, Index n, const std::vector<Index>& support, Rng& rng) {
  const Index p = spec.p;
  Matrix x(n, p);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Row-major fill order keeps each row's draws contiguous in the stream.
  const auto fill = [&](auto&& draw) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < p; ++j) x(i, j) = draw();
  };
  switch (spec.example) {
    case ExampleId::Ex1:
    case ExampleId::Ex2:
    case ExampleId::Ex4:
    case ExampleId::Ex6:
      fill([&] { return normal(rng); });
      break;
    case ExampleId::Ex3: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      fill([&] { return unif(rng); });
      break;
    }
    case ExampleId::Ex5:
      fill([&] { return laplace_unit_variance(rng); });
      break;
    case ExampleId::Ex7: {
      std::exponential_distribution<double> expo(1.0);
      fill([&] { return expo(rng); });
      break;
    }
    case ExampleId::Ex8: {
      std::vector<char> in_support(static_cast<std::size_t>(p), 0);
      for (Index j : support) in_support[static_cast<std::size_t>(j)] = 1;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j)
          x(i, j) = (in_support[static_cast<std::size_t>(j)] ? 1.0 : 5.0) * normal(rng);
      break;
    }
    case ExampleId::Fixed52: {
      // AR(1) rows x_j = 0.5 x_{j-1} + sqrt(0.75) e_j, the Cholesky factor of
      // (Sigma_X)_{ij} = 0.5^{|i-j|} applied row by row.
      const double rho = 0.5;
      const double innov = std::sqrt(1.0 - rho * rho);
      for (Index i = 0; i < n; ++i) {
        double prev = normal(rng);
        x(i, 0) = prev;
        for (Index j = 1; j < p; ++j) {
          prev = rho * prev + innov * normal(rng);
          x(i, j) = prev;
        }
      }
      break;
    }
  }
  if (spec.normalize) {
    for (Index j = 0; j < p; ++j) {
      const double nrm = x.col(j).norm() / std::sqrt(static_cast<double>(n));
      if (nrm > 0.0) x.col(j) /= nrm;
    }
  }
  return x;
}

MultiplicativeError lognormal_error_model(Index p, double tau) {
  const double t2 = tau * tau;
  MultiplicativeError m;
  m.mu_m = Vector::Constant(p, std::exp(t2 / 2.0));
  // Sigma_M + mu mu^T has entries e^{t2} off the diagonal and e^{2 t2} on it.
  m.sigma_m = Matrix::Zero(p, p);
  m.sigma_m.diagonal().setConstant(std::exp(2.0 * t2) - std::exp(t2));
  return m;
}

Corruption corrupt(const Matrix& x, ErrorKind kind, double tau, Rng& rng) {
  const Index n = x.rows();
  const Index p = x.cols();
  Corruption out;
  switch (kind) {
    case ErrorKind::additive: {
      if (!(tau >= 0.0)) throw std::invalid_argument("corrupt: tau must be >= 0");
      std::normal_distribution<double> normal(0.0, 1.0);
      out.z = x;
      if (tau > 0.0)
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < p; ++j) out.z(i, j) += tau * normal(rng);
      out.error_model = AdditiveError{Matrix::Identity(p, p) * (tau * tau)};
      break;
    }
    case ErrorKind::multiplicative: {
      if (!(tau >= 0.0)) throw std::invalid_argument("corrupt: tau must be >= 0");
      std::normal_distribution<double> normal(0.0, tau > 0.0 ? tau : 1.0);
      out.z = x;
      if (tau > 0.0)
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < p; ++j) out.z(i, j) *= std::exp(normal(rng));
      out.error_model = lognormal_error_model(p, tau);
      break;
    }
    case ErrorKind::missing: {
      MissingError m{tau};
      validate(ErrorModel{m}, p);
      std::bernoulli_distribution drop(tau);
      out.z = x;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j)
          if (drop(rng)) out.z(i, j) = 0.0;
      out.error_model = m;
      break;
    }
  }
  return out;
}

Vector gen_response(const Matrix& x, const Vector& beta_star, double sigma_noise, Rng& rng) {
  Vector y = x * beta_star;
  if (sigma_noise > 0.0) {
    std::normal_distribution<double> normal(0.0, sigma_noise);
    for (Index i = 0; i < y.size(); ++i) y(i) += normal(rng);
  }
  return y;
}

Dataset generate(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const Index n = spec.sample_size();
  const BetaMode mode =
      spec.example == ExampleId::Fixed52 ? BetaMode::fixed_52 : BetaMode::random_normal;
  BetaDraw beta = gen_beta(spec.p, spec.sparsity(), mode, rng);
  Dataset d;
  d.x = gen_design(spec, n, beta.support_star, rng);
  Corruption c = corrupt(d.x, spec.error_kind(), spec.tau, rng);
  d.z = std::move(c.z);
  d.error_model = std::move(c.error_model);
  d.y = gen_response(d.x, beta.beta_star, spec.sigma_noise, rng);
  d.beta_star = std::move(beta.beta_star);
  d.support_star = std::move(beta.support_star);
  return d;
}

}  // namespace caznrls
