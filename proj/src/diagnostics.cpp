#include "caznrls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace caznrls {

namespace {

Matrix gather(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
  return out;
}

Vector gather(const Vector& v, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Index>(i)) = v(idx[i]);
  return out;
}

std::vector<Index> complement(Index p, const std::vector<Index>& s) {
  std::vector<char> in(static_cast<std::size_t>(p), 0);
  for (Index j : s) in[static_cast<std::size_t>(j)] = 1;
  std::vector<Index> out;
  for (Index j = 0; j < p; ++j)
    if (!in[static_cast<std::size_t>(j)]) out.push_back(j);
  return out;
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

double irrepresentable_number(const Matrix& sigma, const std::vector<Index>& support) {
  const Index p = sigma.rows();
  const std::vector<Index> comp = complement(p, support);
  if (comp.empty() || support.empty()) return 0.0;
  const Matrix ss = gather(sigma, support, support);
  const Matrix cs = gather(sigma, comp, support);
  const Eigen::FullPivLU<Matrix> lu(ss);
  if (!lu.isInvertible()) return std::numeric_limits<double>::infinity();
  // (Sigma_cs Sigma_ss^{-1})^T = Sigma_ss^{-1} Sigma_sc
  const Matrix prod = lu.solve(cs.transpose()).transpose();
  return prod.cwiseAbs().rowwise().sum().maxCoeff();
}

TrackedSets track_sets(const Vector& beta_k, const Vector& beta_star, double rho, double a) {
  if (beta_k.size() != beta_star.size())
    throw std::invalid_argument("track_sets: vectors differ in length");
  if (!(rho > 0.0)) throw std::invalid_argument("track_sets: rho must be positive");
  TrackedSets out;
  const double inv_rho = 1.0 / rho;
  const double cut = 4.0 * a / ((a + 1.0) * rho);
  for (Index i = 0; i < beta_k.size(); ++i) {
    if (std::abs(beta_k(i)) - std::abs(beta_star(i)) >= inv_rho) out.f.push_back(i);
    if (std::abs(beta_star(i)) <= cut) out.lambda.push_back(i);
  }
  return out;
}

double rec_estimate(const Matrix& sigma, const std::vector<Index>& support, Index s, int samples,
                    Rng& rng) {
  const Index p = sigma.rows();
  if (sigma.cols() != p) throw std::invalid_argument("rec_estimate: sigma must be square");
  const Index cap = std::max<Index>(static_cast<Index>(support.size()),
                                    static_cast<Index>(std::floor(1.5 * static_cast<double>(s))));
  const std::vector<Index> comp = complement(p, support);
  const Index extra_max = std::min<Index>(cap - static_cast<Index>(support.size()),
                                          static_cast<Index>(comp.size()));

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<Index> extra_count(0, std::max<Index>(extra_max, 0));

  double best = std::numeric_limits<double>::infinity();
  auto rayleigh = [&](const Vector& b) {
    const double nn = b.squaredNorm();
    if (nn > 0.0) best = std::min(best, b.dot(sigma * b) / nn);
  };

  // S = supp itself; with an empty support the cone is all of R^p.
  if (!support.empty()) best = min_eigenvalue(gather(sigma, support, support));
  else best = min_eigenvalue(sigma);

  for (int t = 0; t < samples; ++t) {
    // Random superset S of the support.
    std::vector<Index> pool = comp;
    const Index extra = extra_max > 0 ? extra_count(rng) : 0;
    std::vector<Index> set = support;
    for (Index i = 0; i < extra; ++i) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), pool.size() - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
      set.push_back(pool[static_cast<std::size_t>(i)]);
    }
    if (set.empty()) continue;
    const std::vector<Index> rest = complement(p, set);

    const Matrix s_set = gather(sigma, set, set);
    best = std::min(best, min_eigenvalue(s_set));

    Vector b = Vector::Zero(p);
    double l1_in = 0.0;
    for (Index j : set) {
      b(j) = normal(rng);
      l1_in += std::abs(b(j));
    }
    if (!rest.empty()) {
      Vector tail(static_cast<Index>(rest.size()));
      for (Index i = 0; i < tail.size(); ++i) tail(i) = normal(rng);
      const double budget = 3.0 * l1_in * unif(rng);
      const double l1_tail = tail.cwiseAbs().sum();
      if (l1_tail > 0.0) tail *= budget / l1_tail;
      for (std::size_t i = 0; i < rest.size(); ++i) b(rest[i]) = tail(static_cast<Index>(i));
    }
    rayleigh(b);
  }
  return best;
}

TheoryReport theory_report(const Dataset& dataset, const SurrogatePair& pair,
                           const CalibratedPair& cal, double lambda, const TheoryOptions& opts) {
  const Index p = pair.p();
  if (dataset.x.size() == 0 || dataset.beta_star.size() != p)
    throw std::invalid_argument("theory_report: needs the clean design and beta*");
  const double dn = static_cast<double>(dataset.x.rows());

  TheoryReport r;
  Matrix gram = Matrix::Zero(p, p);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(dataset.x.transpose(), 1.0 / dn);
  gram = gram.selfadjointView<Eigen::Lower>();
  r.d_max = max_abs(pair.sigma_hat - gram);

  r.eps_tilde = pair.xi_hat - cal.sigma_tilde * dataset.beta_star;
  r.eps_tilde_inf = r.eps_tilde.cwiseAbs().maxCoeff();

  std::vector<Index> supp = dataset.support_star;
  if (supp.empty())
    for (Index j = 0; j < p; ++j)
      if (dataset.beta_star(j) != 0.0) supp.push_back(j);

  r.beta_ls = Vector::Zero(p);
  if (!supp.empty()) {
    const Matrix ss = gather(cal.sigma_tilde, supp, supp);
    const Eigen::LLT<Matrix> llt(ss);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("theory_report: restricted calibrated matrix is not positive definite");
    const Vector b = llt.solve(gather(pair.xi_hat, supp));
    for (std::size_t i = 0; i < supp.size(); ++i) r.beta_ls(supp[i]) = b(static_cast<Index>(i));

    const Vector dagger = llt.solve(gather(r.eps_tilde, supp));
    const Vector diff = gather(Vector(r.beta_ls - dataset.beta_star), supp);
    r.dagger_residual = (diff - dagger).cwiseAbs().maxCoeff();
  }
  const Vector eps_ls = cal.sigma_tilde * r.beta_ls - pair.xi_hat;
  r.eps_ls_inf = eps_ls.cwiseAbs().maxCoeff();
  r.eps_ls_support_inf = supp.empty() ? 0.0 : gather(eps_ls, supp).cwiseAbs().maxCoeff();
  r.irrepresentable = irrepresentable_number(gram, supp);

  if (opts.rec_samples > 0) {
    Rng rng(opts.seed);
    const Index s = static_cast<Index>(supp.size());
    r.kappa_hat = rec_estimate(gram, supp, s, opts.rec_samples, rng);
    const double denom = *r.kappa_hat - 24.0 * static_cast<double>(s) * r.d_max;
    if (denom > 0.0)
      r.bound_thm2 = 5.0 * std::sqrt(static_cast<double>(s)) * lambda / (2.0 * denom);
  }
  return r;
}

}  // namespace caznrls
