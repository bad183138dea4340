#pragma once

#include "caznrls/simulation.hpp"

#include <iosfwd>
#include <string>

namespace caznrls {

// Plain-text dataset file:
//
//   caznrls-dataset 1
//   n <rows>
//   p <cols>
//   error_model additive|multiplicative|missing
//   [Z]           n lines of p values
//   [y]           n lines
//   [X]           optional, n lines of p values
//   [beta_star]   optional, p lines
//   [support]     optional, one 0-based index per line
//   [sigma_a]     additive: p lines of p values
//   [mu_m]        multiplicative: p lines
//   [sigma_m]     multiplicative: p lines of p values
//   [tau]         missing: one value
//
// Values are whitespace separated and written with 17 significant digits so
// a round trip is exact. Lines starting with '#' are comments.
void write_dataset(std::ostream& os, const Dataset& d);
void write_dataset(const std::string& path, const Dataset& d);

// Throws std::runtime_error on malformed input. Missing optional blocks leave
// the corresponding members empty.
Dataset read_dataset(std::istream& is);
Dataset read_dataset(const std::string& path);

}  // namespace caznrls
