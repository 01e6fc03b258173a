#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "eitqhe/analysis/predictions.hpp"
#include "eitqhe/atomdata/level.hpp"
#include "eitqhe/atomdata/provider.hpp"
#include "eitqhe/constants.hpp"
#include "eitqhe/datagen/dataset.hpp"
#include "eitqhe/error.hpp"
#include "eitqhe/physics/engine.hpp"

namespace eitqhe::analysis {

struct LevelTriple {
  atomdata::LevelQN level1;
  atomdata::LevelQN level2;
  atomdata::LevelQN level3;

  auto operator<=>(const LevelTriple&) const = default;
};

/// A predicted engine: the atom, its three levels and the operating point.
struct EngineSpec {
  int z = 0;
  int a = 0;
  LevelTriple levels;
  double omega_c = 0.0;  // rad/s
  double t0 = 0.0;       // K
  double power = 0.0;    // W
  double t_ratio = 0.0;  // as recorded in the dataset
};

/// Reads the engine out of a prediction: level 1 and the operating point from
/// the scaled inputs, levels 2 and 3 from the rounded outputs.
inline std::optional<EngineSpec> engine_from_prediction(const PredictionRecord& p) {
  const auto raw = datagen::denormalize_inputs(p.inputs);
  auto level = [](double n, double l, double j) -> std::optional<atomdata::LevelQN> {
    const atomdata::LevelQN qn{static_cast<int>(std::lround(n)), static_cast<int>(std::lround(l)),
                               static_cast<int>(std::lround(2.0 * j))};
    if (!qn.valid()) return std::nullopt;
    return qn;
  };
  const auto l1 = level(raw.n1, raw.l1, raw.j1);
  const auto l2 = level(p.predicted[0], p.predicted[1], p.predicted[2]);
  const auto l3 = level(p.predicted[3], p.predicted[4], p.predicted[5]);
  if (!l1 || !l2 || !l3) return std::nullopt;
  EngineSpec e;
  e.z = static_cast<int>(std::lround(raw.z));
  e.a = static_cast<int>(std::lround(raw.a));
  e.levels = {*l1, *l2, *l3};
  e.omega_c = 2.0 * constants::pi * raw.omega_c_hz;
  e.t0 = raw.t0_k;
  e.power = raw.power_w;
  e.t_ratio = raw.t_ratio;
  return e;
}

struct CommonEngineSet {
  LevelTriple levels;
  std::vector<EngineSpec> members;  // one per (Z, A), ascending
};

/// Level triples shared by at least two isotopes inside one regime. Records
/// repeating an (isotope, triple) pair keep their first occurrence.
inline std::vector<CommonEngineSet> select_common_engines(const std::vector<EngineSpec>& engines,
                                                          datagen::Regime regime) {
  std::map<LevelTriple, std::map<std::pair<int, int>, EngineSpec>> groups;
  for (const auto& e : engines) {
    if (datagen::regime_label(e.t_ratio) != regime) continue;
    groups[e.levels].try_emplace({e.z, e.a}, e);
  }
  std::vector<CommonEngineSet> out;
  for (auto& [levels, members] : groups) {
    if (members.size() < 2) continue;
    CommonEngineSet set{levels, {}};
    for (auto& [key, e] : members) set.members.push_back(e);
    out.push_back(std::move(set));
  }
  return out;
}

inline std::vector<CommonEngineSet> select_common_engines(const std::vector<PredictionRecord>& preds,
                                                          datagen::Regime regime) {
  std::vector<EngineSpec> engines;
  engines.reserve(preds.size());
  for (const auto& p : preds) {
    if (auto e = engine_from_prediction(p)) engines.push_back(*e);
  }
  return select_common_engines(engines, regime);
}

using ProviderMap = std::map<std::pair<int, int>, const atomdata::AtomicDataProvider*>;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct EngineComparisonRow {
  LevelTriple levels;
  int z = 0;
  int a = 0;
  double t_ratio = kNaN;
  double t0 = kNaN;
  double omega_c = kNaN;
  double work = kNaN;            // J
  double ergotropy = kNaN;       // J
  double ergotropy_hz = kNaN;    // ergotropy / h
  double hbar_omega13 = kNaN;    // J
  double t_delta_s = kNaN;       // J
  double pop_diff = kNaN;        // rho33 - rho22
  double hbar_omega23 = kNaN;    // J
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

/// Empty when the row reproduces W and the ergotropy from its own columns.
inline std::optional<std::string> row_problem(const EngineComparisonRow& r) {
  auto rel = [](double x, double y) {
    const double s = std::max(std::abs(x), std::abs(y));
    return s == 0.0 ? 0.0 : std::abs(x - y) / s;
  };
  if (!std::isnan(r.ergotropy) && rel(r.ergotropy, r.hbar_omega23 * r.pop_diff) > 1e-12) {
    return fmt::format("ergotropy {} != hbar_omega23 * pop_diff {}", r.ergotropy, r.hbar_omega23 * r.pop_diff);
  }
  if (r.ok() && rel(r.work, r.hbar_omega13 - r.t_delta_s) > 1e-9) {
    return fmt::format("W {} != hbar_omega13 - t_delta_s {}", r.work, r.hbar_omega13 - r.t_delta_s);
  }
  return std::nullopt;
}

inline EngineComparisonRow compare_engine(const EngineSpec& e, const atomdata::AtomicDataProvider& provider) {
  EngineComparisonRow row;
  row.levels = e.levels;
  row.z = e.z;
  row.a = e.a;
  row.t0 = e.t0;
  row.omega_c = e.omega_c;
  try {
    const auto cfg = physics::EngineConfig::make(provider, e.levels.level1, e.levels.level2, e.levels.level3,
                                                 e.omega_c, e.t0, e.power);
    const auto obs = physics::evaluate_engine(cfg, provider);
    row.hbar_omega13 = constants::hbar * obs.omega13;
    row.hbar_omega23 = constants::hbar * obs.omega23;
    row.pop_diff = obs.rho33 - obs.rho22;
    row.ergotropy = obs.ergotropy;
    row.ergotropy_hz = obs.ergotropy / constants::planck;
    switch (obs.status) {
      case physics::EngineStatus::Ok:
        row.t_ratio = *obs.t_ratio;
        row.work = *obs.work;
        row.t_delta_s = *obs.t_delta_s;
        break;
      case physics::EngineStatus::GainThreshold: row.status = "GainThreshold"; break;
      case physics::EngineStatus::ZeroBrightness: row.status = "ZeroBrightness"; break;
    }
  } catch (const Error& err) {
    row.status = std::string(to_string(err.kind()));
  }
  return row;
}

/// One row per member, in (Z, A) order. Rows that cannot be evaluated carry
/// the failure in `status` instead of being dropped.
inline std::vector<EngineComparisonRow> compare_atoms(const CommonEngineSet& set, const ProviderMap& providers) {
  std::vector<EngineComparisonRow> rows;
  for (const auto& e : set.members) {
    const auto it = providers.find({e.z, e.a});
    if (it == providers.end() || it->second == nullptr) {
      EngineComparisonRow row;
      row.levels = e.levels;
      row.z = e.z;
      row.a = e.a;
      row.t0 = e.t0;
      row.omega_c = e.omega_c;
      row.status = "UnknownIsotope";
      rows.push_back(row);
      continue;
    }
    rows.push_back(compare_engine(e, *it->second));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& x, const auto& y) { return std::tie(x.z, x.a) < std::tie(y.z, y.a); });
  return rows;
}

inline constexpr const char* kComparisonHeader =
    "level1,level2,level3,Z,A,t_ratio,t0,omega_c,W,ergotropy,ergotropy_hz,hbar_omega13,t_delta_s,pop_diff,"
    "hbar_omega23,status";

inline void write_comparison(std::ostream& os, const std::vector<EngineComparisonRow>& rows) {
  auto num = [](double v) { return std::isnan(v) ? std::string() : fmt::format("{}", v); };
  os << kComparisonHeader << '\n';
  for (const auto& r : rows) {
    os << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", atomdata::label(r.levels.level1),
                      atomdata::label(r.levels.level2), atomdata::label(r.levels.level3), r.z, r.a, num(r.t_ratio),
                      num(r.t0), num(r.omega_c), num(r.work), num(r.ergotropy), num(r.ergotropy_hz),
                      num(r.hbar_omega13), num(r.t_delta_s), num(r.pop_diff), num(r.hbar_omega23), r.status);
  }
}

// ---- ergotropy versus coupling strength ------------------------------------

struct CurvePoint {
  double omega_c_hz = 0.0;
  double omega_c = 0.0;       // rad/s
  double ergotropy_j = 0.0;
  double ergotropy_rad_s = 0.0;
  double ergotropy_hz = 0.0;
};

struct ErgotropyCurve {
  std::vector<CurvePoint> points;
  std::size_t saturation_index = 0;  // first point within 1% of the last value

  double saturation_hz() const { return points.empty() ? kNaN : points[saturation_index].omega_c_hz; }
};

/// Ergotropy of `engine` with Omega_C = 2 pi f for each grid frequency f (Hz).
inline ErgotropyCurve ergotropy_curve(const physics::EngineConfig& engine,
                                      const atomdata::AtomicDataProvider& provider,
                                      const std::vector<double>& grid_hz) {
  for (std::size_t i = 0; i < grid_hz.size(); ++i) {
    if (!(grid_hz[i] >= 0.0) || (i > 0 && !(grid_hz[i] > grid_hz[i - 1]))) {
      throw Error(ErrorKind::InvalidConfig, fmt::format("grid must be non-negative and ascending (index {})", i));
    }
  }
  const auto t13 = provider.transition(engine.level1(), engine.level3());
  const auto t23 = provider.transition(engine.level2(), engine.level3());
  const auto rates = physics::derive_rates(t13, t23, engine.t0(), engine.t0());
  ErgotropyCurve out;
  for (double f : grid_hz) {
    CurvePoint p;
    p.omega_c_hz = f;
    p.omega_c = 2.0 * constants::pi * f;
    const auto pop = physics::steady_state_populations(rates.r13, rates.r23, p.omega_c);
    p.ergotropy_j = physics::ergotropy(t23.omega, pop.rho33, pop.rho22);
    p.ergotropy_rad_s = p.ergotropy_j / constants::hbar;
    p.ergotropy_hz = p.ergotropy_j / constants::planck;
    out.points.push_back(p);
  }
  if (!out.points.empty()) {
    const double last = out.points.back().ergotropy_j;
    while (out.saturation_index + 1 < out.points.size() &&
           std::abs(last - out.points[out.saturation_index].ergotropy_j) > 0.01 * std::abs(last)) {
      ++out.saturation_index;
    }
  }
  return out;
}

inline void write_curve(std::ostream& os, const ErgotropyCurve& c) {
  os << "omega_c_hz,omega_c_rad_s,ergotropy_j,ergotropy_rad_s,ergotropy_hz\n";
  for (const auto& p : c.points) {
    os << fmt::format("{},{},{},{},{}\n", p.omega_c_hz, p.omega_c, p.ergotropy_j, p.ergotropy_rad_s, p.ergotropy_hz);
  }
}

}  // namespace eitqhe::analysis
