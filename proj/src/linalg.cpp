#include "caznrls/linalg.hpp"

#include <lapacke.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace caznrls {

namespace {
thread_local std::uint64_t g_eig_calls = 0;
}

std::uint64_t sym_eig_call_count() { return g_eig_calls; }

bool is_exactly_symmetric(const Matrix& a) {
  if (a.rows() != a.cols()) return false;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = j + 1; i < a.rows(); ++i)
      if (a(i, j) != a(j, i)) return false;
  return true;
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

Matrix symmetrize(const Matrix& a) {
  Matrix out = 0.5 * (a + a.transpose());
  return out;
}

SymEigen sym_eig(const Matrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("sym_eig: matrix must be square");
  if (!a.allFinite())
    throw std::invalid_argument("sym_eig: matrix has non-finite entries");
  ++g_eig_calls;

  const lapack_int p = static_cast<lapack_int>(a.rows());
  SymEigen out;
  if (p == 0) return out;

  Matrix work = a;
  Vector w(p);
  Matrix z(p, p);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(p));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', p, work.data(), p, 0.0,
                     0.0, 0, 0, 0.0, &found, w.data(), z.data(), p, isuppz.data());
  if (info != 0 || found != p)
    throw std::runtime_error("sym_eig: dsyevr failed with info=" +
                             std::to_string(info));

  // LAPACK returns ascending order.
  out.values = w.reverse();
  out.vectors = z.rowwise().reverse();
  return out;
}

Matrix psd_part(const SymEigen& eig) {
  const Index p = eig.values.size();
  Index k = 0;
  while (k < p && eig.values(k) > 0.0) ++k;
  Matrix out = Matrix::Zero(p, p);
  if (k == 0) return out;
  const Matrix scaled = eig.vectors.leftCols(k) * eig.values.head(k).cwiseSqrt().asDiagonal();
  out.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return out;
}

}  // namespace caznrls
