#pragma once

#include <array>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "eitqhe/csv.hpp"
#include "eitqhe/datagen/dataset.hpp"
#include "eitqhe/error.hpp"

namespace eitqhe::analysis {

inline constexpr std::array<const char*, 6> kTargetNames{"n2", "l2", "j2", "n3", "l3", "j3"};

/// One model prediction: the scaled inputs, rounded and raw outputs, and the
/// true targets when the input file carried them.
struct PredictionRecord {
  std::array<double, 9> inputs{};
  std::array<double, 6> predicted{};
  std::array<double, 6> raw{};
  std::optional<std::array<double, 6>> actual;
};

inline std::string prediction_header(bool with_actual) {
  std::string h;
  for (std::size_t i = 0; i < 9; ++i) h += fmt::format("{}{}", i ? "," : "", datagen::kColumns[i]);
  for (auto n : kTargetNames) h += fmt::format(",{}", n);
  for (auto n : kTargetNames) h += fmt::format(",{}_raw", n);
  if (with_actual) {
    for (auto n : kTargetNames) h += fmt::format(",{}_true", n);
  }
  return h;
}

inline void write_predictions(std::ostream& os, const std::vector<PredictionRecord>& recs) {
  const bool with_actual = !recs.empty() && recs.front().actual.has_value();
  os << prediction_header(with_actual) << '\n';
  fmt::memory_buffer buf;
  for (const auto& r : recs) {
    buf.clear();
    auto put = [&](double v, bool first = false) {
      if (!first) buf.push_back(',');
      fmt::format_to(std::back_inserter(buf), "{}", v);
    };
    for (std::size_t i = 0; i < 9; ++i) put(r.inputs[i], i == 0);
    for (double v : r.predicted) put(v);
    for (double v : r.raw) put(v);
    if (with_actual) {
      if (!r.actual) throw Error(ErrorKind::ShapeMismatch, "mixed records with and without targets");
      for (double v : *r.actual) put(v);
    }
    buf.push_back('\n');
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

inline std::vector<PredictionRecord> read_predictions(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::ParseError, "line 1: empty predictions file");
  const auto head = csv::trim(line);
  bool with_actual;
  if (head == prediction_header(true)) {
    with_actual = true;
  } else if (head == prediction_header(false)) {
    with_actual = false;
  } else {
    throw Error(ErrorKind::ParseError, "line 1: not a predictions header");
  }
  const std::size_t width = with_actual ? 27 : 21;
  std::vector<PredictionRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != width) {
      throw Error(ErrorKind::ParseError, fmt::format("line {}: expected {} fields, got {}", lineno, width, f.size()));
    }
    PredictionRecord r;
    for (std::size_t i = 0; i < 9; ++i) r.inputs[i] = csv::to_double(f[i], lineno);
    for (std::size_t i = 0; i < 6; ++i) {
      r.predicted[i] = csv::to_double(f[9 + i], lineno);
      r.raw[i] = csv::to_double(f[15 + i], lineno);
    }
    if (with_actual) {
      std::array<double, 6> a{};
      for (std::size_t i = 0; i < 6; ++i) a[i] = csv::to_double(f[21 + i], lineno);
      r.actual = a;
    }
    out.push_back(r);
  }
  return out;
}

inline std::vector<PredictionRecord> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  return read_predictions(in);
}

}  // namespace eitqhe::analysis
