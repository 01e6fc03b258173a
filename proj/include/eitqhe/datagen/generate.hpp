#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <variant>
#include <array>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "eitqhe/atomdata/atom.hpp"
#include "eitqhe/atomdata/provider.hpp"
#include "eitqhe/constants.hpp"
#include "eitqhe/datagen/dataset.hpp"
#include "eitqhe/error.hpp"
#include "eitqhe/physics/engine.hpp"
#include "eitqhe/rng.hpp"

namespace eitqhe::datagen {

struct IntRange {
  int lo = 0;
  int hi = 0;
};

/// Log-spaced over [lo, hi], endpoints exact.
inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    g[i] = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    g[i] = lo + t * (hi - lo);
  }
  g.back() = hi;
  return g;
}

struct GenerationSpec {
  std::vector<std::pair<int, int>> atoms{{1, 1},   {3, 6},   {3, 7},   {11, 23},
                                         {19, 39}, {19, 40}, {19, 41}, {37, 85},
                                         {37, 87}, {55, 133}, {55, 137}};
  std::array<IntRange, 3> n{{{3, 12}, {4, 13}, {6, 14}}};
  std::array<IntRange, 3> l{{{1, 10}, {1, 10}, {1, 11}}};
  std::array<IntRange, 3> j2{{{1, 21}, {1, 21}, {1, 23}}};  // doubled j
  std::vector<double> power_grid = log_grid(1.0, 130.0, 7);
  std::vector<double> t0_grid = linear_grid(100.0, 6000.0, 59);
  double waist = 50e-6;
  int q = 1;
  std::size_t count = 300000;
  std::uint64_t seed = 0;
  atomdata::SelectionPolicy policy = atomdata::SelectionPolicy::Permissive;
  std::optional<double> omega_c_override;  // rad/s, debug runs only

  void validate() const {
    static constexpr IntRange kNBounds[3] = {{3, 12}, {4, 13}, {6, 14}};
    static constexpr IntRange kLBounds[3] = {{1, 10}, {1, 10}, {1, 11}};
    static constexpr IntRange kJ2Bounds[3] = {{1, 21}, {1, 21}, {1, 23}};
    for (int k = 0; k < 3; ++k) {
      if (n[k].lo > n[k].hi || n[k].lo < kNBounds[k].lo || n[k].hi > kNBounds[k].hi) {
        throw Error(ErrorKind::InvalidConfig, fmt::format("n{} range [{}, {}]", k + 1, n[k].lo, n[k].hi));
      }
      if (l[k].lo > l[k].hi || l[k].lo < kLBounds[k].lo || l[k].hi > kLBounds[k].hi) {
        throw Error(ErrorKind::InvalidConfig, fmt::format("l{} range [{}, {}]", k + 1, l[k].lo, l[k].hi));
      }
      if (j2[k].lo > j2[k].hi || j2[k].lo < kJ2Bounds[k].lo || j2[k].hi > kJ2Bounds[k].hi) {
        throw Error(ErrorKind::InvalidConfig,
                    fmt::format("j{} range [{}/2, {}/2]", k + 1, j2[k].lo, j2[k].hi));
      }
    }
    if (power_grid.size() != 7) throw Error(ErrorKind::InvalidConfig, "power grid needs 7 values");
    if (t0_grid.size() != 59) throw Error(ErrorKind::InvalidConfig, "t0 grid needs 59 values");
    for (double p : power_grid) {
      if (!(p > 0.0)) throw Error(ErrorKind::InvalidConfig, "power grid values must be positive");
    }
    for (double t : t0_grid) {
      if (!(t > 0.0)) throw Error(ErrorKind::InvalidConfig, "t0 grid values must be positive");
    }
    if (atoms.empty()) throw Error(ErrorKind::InvalidConfig, "no atoms");
    for (const auto& [z, a] : atoms) {
      if (!atomdata::is_known_isotope(z, a)) {
        throw Error(ErrorKind::UnknownIsotope, fmt::format("Z={} A={}", z, a));
      }
    }
    if (!(waist > 0.0)) throw Error(ErrorKind::InvalidConfig, "waist must be positive");
    if (omega_c_override && !(*omega_c_override >= 0.0)) {
      throw Error(ErrorKind::InvalidConfig, "omega_c override must be >= 0");
    }
  }
};

inline constexpr int kMaxLevelAttempts = 10000;

using LevelTriple = std::tuple<atomdata::LevelQN, atomdata::LevelQN, atomdata::LevelQN>;

/// Rejection-samples (level1, level2, level3) with n1 < n2 < n3, l < n and j = l +- 1/2,
/// each level inside the atom's valence model.
inline LevelTriple sample_levels(Rng& rng, const GenerationSpec& spec, const atomdata::AtomSpec& atom) {
  std::array<atomdata::LevelQN, 3> lv;
  for (int attempt = 0; attempt < kMaxLevelAttempts; ++attempt) {
    bool ok = true;
    for (int k = 0; k < 3 && ok; ++k) {
      const int n = static_cast<int>(rng.integer(spec.n[k].lo, spec.n[k].hi));
      const int l = static_cast<int>(rng.integer(spec.l[k].lo, spec.l[k].hi));
      const bool low_ok = 2 * l - 1 >= spec.j2[k].lo && 2 * l - 1 <= spec.j2[k].hi;
      const bool high_ok = 2 * l + 1 >= spec.j2[k].lo && 2 * l + 1 <= spec.j2[k].hi;
      if (!low_ok && !high_ok) {
        ok = false;
        break;
      }
      const bool high = low_ok && high_ok ? rng.integer(0, 1) == 1 : high_ok;
      lv[k] = {n, l, high ? 2 * l + 1 : 2 * l - 1};
      ok = (k == 0 || lv[k - 1].n < n) && atom.has_level(lv[k]);
    }
    if (ok) return {lv[0], lv[1], lv[2]};
  }
  throw Error(ErrorKind::ExhaustedAttempts,
              fmt::format("no level triple after {} attempts", kMaxLevelAttempts));
}

using ProviderFactory =
    std::function<std::unique_ptr<atomdata::AtomicDataProvider>(int z, int a, atomdata::SelectionPolicy)>;

inline ProviderFactory builtin_factory() {
  return [](int z, int a, atomdata::SelectionPolicy policy) -> std::unique_ptr<atomdata::AtomicDataProvider> {
    return atomdata::builtin_provider(z, a, policy);
  };
}

struct GenerationReport {
  std::uint64_t seed = 0;
  std::size_t requested = 0;
  std::size_t workers = 1;
  std::size_t candidates = 0;
  std::size_t accepted = 0;
  std::map<std::string, std::size_t> rejected;  // by reason
  std::vector<std::string> providers;           // "Z:A:source"

  std::size_t rejected_total() const {
    std::size_t t = 0;
    for (const auto& [k, v] : rejected) t += v;
    return t;
  }
};

struct GeneratedData {
  Dataset records;
  GenerationReport report;
};

inline constexpr std::size_t kRejectionWindow = 100000;
inline constexpr double kMaxRejectionRate = 0.999;

namespace detail {

struct WorkerResult {
  Dataset records;
  std::size_t candidates = 0;
  std::map<std::string, std::size_t> rejected;
};

struct AtomSlot {
  atomdata::AtomSpec spec;
  const atomdata::AtomicDataProvider* provider;
};

/// One candidate: either a record or a rejection reason.
inline std::variant<SampleRecord, std::string> try_candidate(Rng& rng, const GenerationSpec& spec,
                                                             const std::vector<AtomSlot>& atoms) {
  const auto& slot = atoms[rng.index(atoms.size())];
  const auto [l1, l2, l3] = sample_levels(rng, spec, slot.spec);
  const double power = spec.power_grid[rng.index(spec.power_grid.size())];
  const double t0 = spec.t0_grid[rng.index(spec.t0_grid.size())];
  const auto& provider = *slot.provider;
  try {
    const double omega_c = spec.omega_c_override
                               ? *spec.omega_c_override
                               : provider.rabi_frequency(l2, l3, power, spec.waist, spec.q);
    const auto cfg = physics::EngineConfig::make(provider, l1, l2, l3, omega_c, t0, power, spec.waist, spec.q);
    const auto obs = physics::evaluate_engine(cfg, provider);
    if (obs.status == physics::EngineStatus::GainThreshold) return std::string("GainThreshold");
    if (obs.status == physics::EngineStatus::ZeroBrightness) return std::string("ZeroBrightness");
    if (!std::isfinite(*obs.t_ratio) || !(*obs.t_ratio > 0.0)) return std::string("NonFiniteRatio");
    RawInputs raw;
    raw.n1 = l1.n;
    raw.l1 = l1.l;
    raw.j1 = l1.j();
    raw.omega_c_hz = omega_c / (2.0 * constants::pi);
    raw.power_w = power;
    raw.t0_k = t0;
    raw.t_ratio = *obs.t_ratio;
    raw.z = slot.spec.z;
    raw.a = slot.spec.a;
    SampleRecord rec;
    rec.inputs = normalize_inputs(raw);
    rec.targets = {static_cast<double>(l2.n), static_cast<double>(l2.l), l2.j(),
                   static_cast<double>(l3.n), static_cast<double>(l3.l), l3.j()};
    return rec;
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::InvalidConfig: return std::string("EnergyOrder");
      case ErrorKind::MissingLevel:
      case ErrorKind::MissingTransition:
      case ErrorKind::NotUpward:
      case ErrorKind::GainThreshold:
      case ErrorKind::NonPositiveBrightness:
      case ErrorKind::NonPositiveInput:
      case ErrorKind::SingularDenominator:
      case ErrorKind::DegenerateSystem:
      case ErrorKind::InvalidFrequencies: return std::string(to_string(e.kind()));
      default: throw;
    }
  }
}

inline WorkerResult run_worker(const GenerationSpec& spec, const std::vector<AtomSlot>& atoms,
                               std::size_t worker, std::size_t quota) {
  WorkerResult out;
  out.records.reserve(quota);
  Rng rng = Rng::stream(spec.seed, worker);
  std::size_t window_candidates = 0;
  std::size_t window_accepted = 0;
  while (out.records.size() < quota) {
    auto result = try_candidate(rng, spec, atoms);
    ++out.candidates;
    ++window_candidates;
    if (auto* rec = std::get_if<SampleRecord>(&result)) {
      out.records.push_back(*rec);
      ++window_accepted;
    } else {
      ++out.rejected[std::get<std::string>(result)];
    }
    if (window_candidates == kRejectionWindow) {
      const double rate = 1.0 - static_cast<double>(window_accepted) / static_cast<double>(kRejectionWindow);
      if (rate > kMaxRejectionRate) {
        throw Error(ErrorKind::ExhaustedAttempts,
                    fmt::format("rejection rate {} over {} candidates", rate, kRejectionWindow));
      }
      window_candidates = 0;
      window_accepted = 0;
    }
  }
  return out;
}

}  // namespace detail

/// Generates exactly spec.count records. Worker w draws from stream (seed, w) and
/// fills its quota; results are concatenated in worker order.
inline GeneratedData generate_dataset(const GenerationSpec& spec,
                                      const ProviderFactory& factory = builtin_factory(),
                                      std::size_t workers = 1) {
  spec.validate();
  if (workers < 1) workers = 1;

  std::vector<std::unique_ptr<atomdata::AtomicDataProvider>> owned;
  std::vector<detail::AtomSlot> atoms;
  GeneratedData out;
  for (const auto& [z, a] : spec.atoms) {
    owned.push_back(factory(z, a, spec.policy));
    atoms.push_back({atomdata::make_atom(z, a), owned.back().get()});
    out.report.providers.push_back(fmt::format(
        "{}:{}:{}", z, a, owned.back()->source() == atomdata::SourceTag::Builtin ? "builtin" : "file"));
  }

  std::vector<detail::WorkerResult> results(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto quota = [&](std::size_t w) { return spec.count / workers + (w < spec.count % workers ? 1 : 0); };
  auto work = [&](std::size_t w) {
    try {
      results[w] = detail::run_worker(spec, atoms, w, quota(w));
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  auto& report = out.report;
  report.seed = spec.seed;
  report.requested = spec.count;
  report.workers = workers;
  out.records.reserve(spec.count);
  for (auto& r : results) {
    report.candidates += r.candidates;
    for (const auto& [k, v] : r.rejected) report.rejected[k] += v;
    out.records.insert(out.records.end(), r.records.begin(), r.records.end());
  }
  report.accepted = out.records.size();
  return out;
}

inline void write_report(std::ostream& os, const GenerationSpec& spec, const GenerationReport& r) {
  os << fmt::format("seed={}\n", r.seed);
  os << fmt::format("requested={}\n", r.requested);
  os << fmt::format("workers={}\n", r.workers);
  os << fmt::format("candidates={}\n", r.candidates);
  os << fmt::format("accepted={}\n", r.accepted);
  os << fmt::format("rejected={}\n", r.rejected_total());
  for (const auto& [reason, n] : r.rejected) os << fmt::format("rejected.{}={}\n", reason, n);
  os << fmt::format("providers={}\n", fmt::join(r.providers, ","));
  os << fmt::format("power_grid_w={}\n", fmt::join(spec.power_grid, ","));
  os << "power_grid_spacing=log-uniform\n";
  os << fmt::format("t0_grid_k={}\n", fmt::join(spec.t0_grid, ","));
  os << "t0_grid_spacing=uniform\n";
  os << fmt::format("waist_m={}\n", spec.waist);
  os << fmt::format("q={}\n", spec.q);
  os << fmt::format("policy={}\n",
                    spec.policy == atomdata::SelectionPolicy::Permissive ? "permissive" : "strict");
  if (spec.omega_c_override) os << fmt::format("omega_c_override={}\n", *spec.omega_c_override);
}

}  // namespace eitqhe::datagen
