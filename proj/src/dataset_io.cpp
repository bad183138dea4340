#include "caznrls/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace caznrls {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix(std::ostream& os, const char* tag, const Matrix& m) {
  os << '[' << tag << "]\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << fmt(m(i, j));
    os << '\n';
  }
}

void write_vector(std::ostream& os, const char* tag, const Vector& v) {
  os << '[' << tag << "]\n";
  for (Index i = 0; i < v.size(); ++i) os << fmt(v(i)) << '\n';
}

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("dataset file: " + what);
}

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> vals;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (used != tok.size()) fail("bad number '" + tok + "'");
    } catch (const std::logic_error&) {
      fail("bad number '" + tok + "'");
    }
  }
  return vals;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows, Index r, Index c,
                 const std::string& tag) {
  if (static_cast<Index>(rows.size()) != r)
    fail("block [" + tag + "] has " + std::to_string(rows.size()) + " rows, expected " +
         std::to_string(r));
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != c)
      fail("block [" + tag + "] row " + std::to_string(i) + " has wrong width");
    for (Index j = 0; j < c; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
  }
  return m;
}

Vector to_vector(const std::vector<std::vector<double>>& rows, Index r, const std::string& tag) {
  return to_matrix(rows, r, 1, tag).col(0);
}

}  // namespace

void write_dataset(std::ostream& os, const Dataset& d) {
  const Index n = d.z.rows();
  const Index p = d.z.cols();
  os << "caznrls-dataset 1\n";
  os << "n " << n << "\np " << p << '\n';
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AdditiveError>) os << "error_model additive\n";
        else if constexpr (std::is_same_v<T, MultiplicativeError>) os << "error_model multiplicative\n";
        else os << "error_model missing\n";
      },
      d.error_model);
  write_matrix(os, "Z", d.z);
  write_vector(os, "y", d.y);
  if (d.x.size() > 0) write_matrix(os, "X", d.x);
  if (d.beta_star.size() > 0) write_vector(os, "beta_star", d.beta_star);
  if (!d.support_star.empty()) {
    os << "[support]\n";
    for (Index j : d.support_star) os << j << '\n';
  }
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AdditiveError>) {
          write_matrix(os, "sigma_a", m.sigma_a);
        } else if constexpr (std::is_same_v<T, MultiplicativeError>) {
          write_vector(os, "mu_m", m.mu_m);
          write_matrix(os, "sigma_m", m.sigma_m);
        } else {
          os << "[tau]\n" << fmt(m.tau) << '\n';
        }
      },
      d.error_model);
}

void write_dataset(const std::string& path, const Dataset& d) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_dataset(os, d);
  if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

Dataset read_dataset(std::istream& is) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next_line() || line != "caznrls-dataset 1") fail("missing 'caznrls-dataset 1' header");

  std::map<std::string, std::string> header;
  std::map<std::string, std::vector<std::vector<double>>> blocks;
  std::string current;
  while (next_line()) {
    if (line.front() == '[') {
      if (line.back() != ']') fail("bad block tag '" + line + "'");
      current = line.substr(1, line.size() - 2);
      if (blocks.count(current)) fail("duplicate block [" + current + "]");
      blocks[current];
      continue;
    }
    if (current.empty()) {
      std::istringstream ss(line);
      std::string key, value;
      ss >> key >> value;
      if (key.empty() || value.empty()) fail("bad header line '" + line + "'");
      header[key] = value;
    } else {
      blocks[current].push_back(parse_row(line));
    }
  }
  for (const char* key : {"n", "p", "error_model"})
    if (!header.count(key)) fail(std::string("missing header key '") + key + "'");
  Index n = 0, p = 0;
  try {
    n = std::stol(header["n"]);
    p = std::stol(header["p"]);
  } catch (const std::logic_error&) {
    fail("bad n or p");
  }
  if (n < 1 || p < 1) fail("n and p must be positive");
  auto need = [&](const std::string& tag) -> const std::vector<std::vector<double>>& {
    auto it = blocks.find(tag);
    if (it == blocks.end()) fail("missing block [" + tag + "]");
    return it->second;
  };

  Dataset d;
  d.z = to_matrix(need("Z"), n, p, "Z");
  d.y = to_vector(need("y"), n, "y");
  if (blocks.count("X")) d.x = to_matrix(blocks["X"], n, p, "X");
  if (blocks.count("beta_star")) d.beta_star = to_vector(blocks["beta_star"], p, "beta_star");
  if (blocks.count("support")) {
    for (const auto& row : blocks["support"]) {
      if (row.size() != 1) fail("block [support] must have one index per line");
      const auto j = static_cast<Index>(row[0]);
      if (static_cast<double>(j) != row[0] || j < 0 || j >= p) fail("bad support index");
      d.support_star.push_back(j);
    }
  }
  const std::string kind = header["error_model"];
  if (kind == "additive") {
    d.error_model = AdditiveError{to_matrix(need("sigma_a"), p, p, "sigma_a")};
  } else if (kind == "multiplicative") {
    d.error_model = MultiplicativeError{to_vector(need("mu_m"), p, "mu_m"),
                                        to_matrix(need("sigma_m"), p, p, "sigma_m")};
  } else if (kind == "missing") {
    d.error_model = MissingError{to_vector(need("tau"), 1, "tau")(0)};
  } else {
    fail("unknown error_model '" + kind + "'");
  }
  try {
    validate(d.error_model, p);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  return d;
}

Dataset read_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_dataset(is);
}

}  // namespace caznrls
