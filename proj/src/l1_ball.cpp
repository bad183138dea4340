#include "caznrls/l1_ball.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace caznrls {

namespace {

// Soft-threshold level theta with sum_i max(|v_i| - theta, 0) == radius.
// Pivot search over the magnitudes (Duchi et al.); the pivot is the middle
// of the current candidate range so results are deterministic.
double threshold(std::vector<double>& mag, double radius) {
  std::size_t lo = 0;
  std::size_t hi = mag.size();
  double sum_above = 0.0;
  std::size_t count_above = 0;
  while (lo < hi) {
    const double pivot = mag[lo + (hi - lo) / 2];
    // Partition [lo, hi) into >= pivot first, then < pivot.
    std::size_t mid = lo;
    double partial = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      if (mag[i] >= pivot) {
        partial += mag[i];
        std::swap(mag[i], mag[mid]);
        ++mid;
      }
    }
    const std::size_t cnt = mid - lo;
    if ((sum_above + partial) - static_cast<double>(count_above + cnt) * pivot < radius) {
      sum_above += partial;
      count_above += cnt;
      lo = mid;
    } else {
      // Continue with the elements >= pivot, minus one copy of the pivot.
      for (std::size_t i = lo; i < mid; ++i) {
        if (mag[i] == pivot) {
          std::swap(mag[i], mag[mid - 1]);
          break;
        }
      }
      hi = mid - 1;
    }
  }
  return (sum_above - radius) / static_cast<double>(count_above);
}

}  // namespace

void l1_ball_project_inplace(std::span<double> v, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("l1_ball_project: radius must be >= 0");
  double l1 = 0.0;
  for (double x : v) l1 += std::abs(x);
  if (l1 <= radius) return;
  if (radius == 0.0) {
    for (double& x : v) x = 0.0;
    return;
  }
  std::vector<double> mag;
  mag.reserve(v.size());
  for (double x : v)
    if (x != 0.0) mag.push_back(std::abs(x));
  const double theta = threshold(mag, radius);
  for (double& x : v) {
    const double a = std::abs(x) - theta;
    x = a > 0.0 ? std::copysign(a, x) : 0.0;
  }
}

Vector l1_ball_project(const Vector& v, double radius) {
  Vector out = v;
  l1_ball_project_inplace(std::span<double>(out.data(), static_cast<std::size_t>(out.size())),
                          radius);
  return out;
}

}  // namespace caznrls
