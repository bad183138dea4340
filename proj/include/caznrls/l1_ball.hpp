#pragma once

#include <span>

#include "caznrls/linalg.hpp"

namespace caznrls {

// Euclidean projection onto {x : ||x||_1 <= radius} using the expected
// linear-time pivot scheme. radius == 0 maps everything to zero.
Vector l1_ball_project(const Vector& v, double radius);

// In-place variant over a contiguous buffer (used for flattened matrices).
void l1_ball_project_inplace(std::span<double> v, double radius);

}  // namespace caznrls
