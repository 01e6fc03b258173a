#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "eitqhe/csv.hpp"
#include "eitqhe/error.hpp"
#include "eitqhe/mlp/network.hpp"

// Text model format:
//   mlpmodel v1
//   layers 9 128 128 6
//   activation tanh
//   seed 42
//   then for each layer, its weight rows followed by one bias row
//   (space-separated shortest round-trip decimals).
namespace eitqhe::mlp {

inline constexpr int kModelFormatVersion = 1;

inline void save_model(std::ostream& os, const MLPModel& m) {
  os << fmt::format("mlpmodel v{}\n", kModelFormatVersion);
  os << fmt::format("layers {}\n", fmt::join(m.layer_sizes, " "));
  os << fmt::format("activation {}\n", to_string(m.activation));
  os << fmt::format("seed {}\n", m.seed);
  fmt::memory_buffer buf;
  auto row = [&](const auto& values, Eigen::Index n) {
    for (Eigen::Index c = 0; c < n; ++c) {
      if (c) buf.push_back(' ');
      fmt::format_to(std::back_inserter(buf), "{}", values(c));
    }
    buf.push_back('\n');
  };
  for (std::size_t k = 0; k < m.layers(); ++k) {
    const auto& w = m.weights[k];
    for (Eigen::Index r = 0; r < w.rows(); ++r) row(w.row(r), w.cols());
    row(m.biases[k], m.biases[k].size());
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

namespace detail {

inline std::vector<std::string> words(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

}  // namespace detail

inline MLPModel load_model(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](const char* what) {
    if (!std::getline(is, line)) {
      throw Error(ErrorKind::ParseError, fmt::format("line {}: truncated, expected {}", lineno + 1, what));
    }
    ++lineno;
    return detail::words(line);
  };

  auto head = next("header");
  if (head.size() != 2 || head[0] != "mlpmodel") {
    throw Error(ErrorKind::ParseError, "line 1: missing 'mlpmodel' header");
  }
  if (head[1] != fmt::format("v{}", kModelFormatVersion)) {
    throw Error(ErrorKind::VersionMismatch, fmt::format("model format {} (reader v{})", head[1], kModelFormatVersion));
  }

  MLPModel m;
  auto layers = next("layers");
  if (layers.size() < 3 || layers[0] != "layers") throw Error(ErrorKind::ParseError, "line 2: bad layers");
  for (std::size_t i = 1; i < layers.size(); ++i) m.layer_sizes.push_back(csv::to_int(layers[i], lineno));
  try {
    check_sizes(m.layer_sizes);
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, fmt::format("line 2: {}", e.what()));
  }
  auto act = next("activation");
  if (act.size() != 2 || act[0] != "activation" || (act[1] != "tanh" && act[1] != "relu")) {
    throw Error(ErrorKind::ParseError, "line 3: bad activation");
  }
  m.activation = parse_activation(act[1]);
  auto seed = next("seed");
  if (seed.size() != 2 || seed[0] != "seed") throw Error(ErrorKind::ParseError, "line 4: bad seed");
  try {
    m.seed = std::stoull(seed[1]);
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "line 4: bad seed");
  }

  auto read_row = [&](Eigen::Index n, auto&& sink) {
    const auto w = next("parameter row");
    if (static_cast<Eigen::Index>(w.size()) != n) {
      throw Error(ErrorKind::ParseError, fmt::format("line {}: expected {} values, got {}", lineno, n, w.size()));
    }
    for (Eigen::Index c = 0; c < n; ++c) sink(c, csv::to_double(w[static_cast<std::size_t>(c)], lineno));
  };
  for (std::size_t k = 1; k < m.layer_sizes.size(); ++k) {
    const int rows = m.layer_sizes[k];
    const int cols = m.layer_sizes[k - 1];
    Matrix w(rows, cols);
    Vector b(rows);
    for (int r = 0; r < rows; ++r) read_row(cols, [&](Eigen::Index c, double v) { w(r, c) = v; });
    read_row(rows, [&](Eigen::Index c, double v) { b(c) = v; });
    m.weights.push_back(std::move(w));
    m.biases.push_back(std::move(b));
  }
  return m;
}

inline void save_model_file(const std::string& path, const MLPModel& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  save_model(out, m);
}

inline MLPModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  return load_model(in);
}

}  // namespace eitqhe::mlp
