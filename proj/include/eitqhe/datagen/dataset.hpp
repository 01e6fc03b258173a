#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "eitqhe/atomdata/atom.hpp"
#include "eitqhe/csv.hpp"
#include "eitqhe/error.hpp"
#include "eitqhe/rng.hpp"

namespace eitqhe::datagen {

inline constexpr double kOmegaReferenceHz = 1e8;
inline constexpr double kPowerReferenceW = 130.0;
inline constexpr double kTemperatureReferenceK = 5778.0;

inline constexpr std::array<std::string_view, 15> kColumns{
    "n1", "l1", "j1", "omega_c_s", "power_s", "t0_s", "t_ratio", "z",
    "a",  "n2", "l2", "j2",        "n3",      "l3",   "j3"};

inline constexpr std::size_t kInputWidth = 9;
inline constexpr std::size_t kTargetWidth = 6;

/// One supervised row: 9 scaled inputs then 6 target quantum numbers.
struct SampleRecord {
  std::array<double, kInputWidth> inputs{};
  std::array<double, kTargetWidth> targets{};

  double n1() const { return inputs[0]; }
  double l1() const { return inputs[1]; }
  double j1() const { return inputs[2]; }
  double omega_c_s() const { return inputs[3]; }
  double power_s() const { return inputs[4]; }
  double t0_s() const { return inputs[5]; }
  double t_ratio() const { return inputs[6]; }
  double z() const { return inputs[7]; }
  double a() const { return inputs[8]; }

  bool operator==(const SampleRecord&) const = default;
};

using Dataset = std::vector<SampleRecord>;

inline std::string header_line() {
  std::string out;
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i) out += ',';
    out += kColumns[i];
  }
  return out;
}

inline std::size_t column_index(std::string_view name) {
  const auto it = std::find(kColumns.begin(), kColumns.end(), name);
  if (it == kColumns.end()) throw Error(ErrorKind::UnknownColumn, std::string(name));
  return static_cast<std::size_t>(it - kColumns.begin());
}

inline double column_value(const SampleRecord& r, std::size_t column) {
  return column < kInputWidth ? r.inputs[column] : r.targets[column - kInputWidth];
}

// ---- normalization ---------------------------------------------------------

/// Physical inputs before scaling. Omega_C in Hz (cycles per second).
struct RawInputs {
  double n1 = 0, l1 = 0, j1 = 0;
  double omega_c_hz = 0;
  double power_w = 0;
  double t0_k = 0;
  double t_ratio = 0;
  double z = 0, a = 0;
};

inline std::array<double, kInputWidth> normalize_inputs(const RawInputs& raw) {
  return {raw.n1,
          raw.l1,
          raw.j1,
          raw.omega_c_hz / kOmegaReferenceHz,
          raw.power_w / kPowerReferenceW,
          raw.t0_k / kTemperatureReferenceK,
          raw.t_ratio,
          raw.z,
          raw.a};
}

inline RawInputs denormalize_inputs(const std::array<double, kInputWidth>& s) {
  return {s[0], s[1], s[2], s[3] * kOmegaReferenceHz, s[4] * kPowerReferenceW,
          s[5] * kTemperatureReferenceK, s[6], s[7], s[8]};
}

// ---- CSV -------------------------------------------------------------------

inline void write_record(std::ostream& os, const SampleRecord& r) {
  fmt::memory_buffer buf;
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i) buf.push_back(',');
    fmt::format_to(std::back_inserter(buf), "{}", column_value(r, i));
  }
  buf.push_back('\n');
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline void write_dataset(std::ostream& os, const Dataset& data) {
  os << header_line() << '\n';
  for (const auto& r : data) write_record(os, r);
}

inline Dataset read_dataset(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || csv::trim(line) != header_line()) {
    throw Error(ErrorKind::ParseError, "line 1: expected dataset header " + header_line());
  }
  Dataset out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != kColumns.size()) {
      throw Error(ErrorKind::ParseError,
                  fmt::format("line {}: expected {} fields, got {}", lineno, kColumns.size(),
                              fields.size()));
    }
    SampleRecord r;
    for (std::size_t i = 0; i < kInputWidth; ++i) r.inputs[i] = csv::to_double(fields[i], lineno);
    for (std::size_t i = 0; i < kTargetWidth; ++i) {
      r.targets[i] = csv::to_double(fields[kInputWidth + i], lineno);
    }
    out.push_back(r);
  }
  return out;
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  return read_dataset(in);
}

/// First violated invariant of a record, if any.
inline std::optional<std::string> record_problem(const SampleRecord& r) {
  for (double v : r.inputs) {
    if (!std::isfinite(v)) return "non-finite input";
  }
  const double n[3] = {r.inputs[0], r.targets[0], r.targets[3]};
  const double l[3] = {r.inputs[1], r.targets[1], r.targets[4]};
  const double j[3] = {r.inputs[2], r.targets[2], r.targets[5]};
  if (!(n[0] < n[1] && n[1] < n[2])) return "n1 < n2 < n3 violated";
  for (int k = 0; k < 3; ++k) {
    if (n[k] != std::floor(n[k]) || l[k] != std::floor(l[k])) return "non-integer n or l";
    if (!(l[k] >= 0 && l[k] < n[k])) return "l < n violated";
    if (std::abs(std::abs(j[k] - l[k]) - 0.5) > 1e-12 || j[k] <= 0) return "j != l +- 1/2";
  }
  if (!(r.t_ratio() > 0.0)) return "t_ratio not positive";
  if (!(r.omega_c_s() >= 0.0 && r.power_s() > 0.0 && r.t0_s() > 0.0)) return "bad scaled input";
  if (!atomdata::is_known_isotope(static_cast<int>(r.z()), static_cast<int>(r.a()))) {
    return "unknown isotope";
  }
  return std::nullopt;
}

// ---- split -----------------------------------------------------------------

struct Split {
  Dataset train;
  Dataset validation;
};

/// Shuffled split with |train| = round(fraction * N).
inline Split split_dataset(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (data.empty()) throw Error(ErrorKind::EmptyDataset, "cannot split an empty dataset");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("train fraction {}", train_fraction));
  }
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(data.size())));
  Split s;
  s.train.reserve(n_train);
  s.validation.reserve(data.size() - n_train);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? s.train : s.validation).push_back(data[order[i]]);
  }
  return s;
}

// ---- regimes ---------------------------------------------------------------

enum class Regime { Low, Mid, High };

inline constexpr double kRegimeLowEdge = 2.24;
inline constexpr double kRegimeHighEdge = 3.0;

inline Regime regime_label(double t_ratio) {
  if (t_ratio < kRegimeLowEdge) return Regime::Low;
  if (t_ratio <= kRegimeHighEdge) return Regime::Mid;
  return Regime::High;
}

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Low: return "low";
    case Regime::Mid: return "mid";
    case Regime::High: return "high";
  }
  return "?";
}

inline Regime parse_regime(std::string_view s) {
  if (s == "low") return Regime::Low;
  if (s == "mid") return Regime::Mid;
  if (s == "high") return Regime::High;
  throw Error(ErrorKind::UsageError, fmt::format("regime '{}' is not low|mid|high", s));
}

// ---- histogram -------------------------------------------------------------

/// Bins are [e_i, e_{i+1}); the last bin also holds its upper edge.
/// Values outside the edges are counted in the nearest end bin.
struct Histogram {
  std::string column;
  std::vector<double> edges;
  std::vector<std::size_t> counts;

  std::size_t total() const {
    std::size_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

inline std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
  if (bins < 1 || !(hi > lo)) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("bins={} over [{}, {}]", bins, lo, hi));
  }
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  edges.back() = hi;
  return edges;
}

inline Histogram histogram(const Dataset& data, std::string_view column, std::vector<double> edges) {
  const auto col = column_index(column);
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw Error(ErrorKind::InvalidConfig, "histogram edges must be strictly increasing");
  }
  Histogram h{std::string(column), std::move(edges), {}};
  const std::size_t bins = h.edges.size() - 1;
  h.counts.assign(bins, 0);
  for (const auto& r : data) {
    const double v = column_value(r, col);
    const auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
    std::size_t bin = it == h.edges.begin() ? 0 : static_cast<std::size_t>(it - h.edges.begin()) - 1;
    if (bin >= bins) bin = bins - 1;
    ++h.counts[bin];
  }
  return h;
}

inline void write_histogram(std::ostream& os, const Histogram& h) {
  os << "lo,hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    os << fmt::format("{},{},{}\n", h.edges[i], h.edges[i + 1], h.counts[i]);
  }
}

}  // namespace eitqhe::datagen
