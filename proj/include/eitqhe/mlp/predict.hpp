#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "eitqhe/atomdata/level.hpp"
#include "eitqhe/mlp/network.hpp"

namespace eitqhe::mlp {

struct PredictedStates {
  std::array<double, 6> raw{};
  std::array<double, 6> rounded{};  // n2, l2, j2, n3, l3, j3

  atomdata::LevelQN level2() const { return level(0); }
  atomdata::LevelQN level3() const { return level(3); }

 private:
  atomdata::LevelQN level(std::size_t o) const {
    return {static_cast<int>(rounded[o]), static_cast<int>(rounded[o + 1]),
            static_cast<int>(std::lround(2.0 * rounded[o + 2]))};
  }
};

struct QuantumBounds {
  int n_lo, n_hi, l_lo, l_hi;
};

// Target ranges of the second and third levels.
inline constexpr QuantumBounds kLevel2Bounds{4, 13, 1, 10};
inline constexpr QuantumBounds kLevel3Bounds{6, 14, 1, 11};

/// Rounds one (n, l, j) triple: n and l to the nearest integer inside the bounds,
/// then l lowered below n, then j to the nearest half-odd value in {l - 1/2, l + 1/2}.
inline std::array<double, 3> round_level(double n_raw, double l_raw, double j_raw, const QuantumBounds& b) {
  const auto n = std::clamp(static_cast<int>(std::lround(n_raw)), b.n_lo, b.n_hi);
  auto l = std::clamp(static_cast<int>(std::lround(l_raw)), b.l_lo, b.l_hi);
  l = std::min(l, n - 1);
  const double j = std::floor(j_raw) + 0.5;
  return {static_cast<double>(n), static_cast<double>(l), std::clamp(j, l - 0.5, l + 0.5)};
}

inline PredictedStates round_states(const std::array<double, 6>& raw) {
  PredictedStates p;
  p.raw = raw;
  const auto a = round_level(raw[0], raw[1], raw[2], kLevel2Bounds);
  const auto b = round_level(raw[3], raw[4], raw[5], kLevel3Bounds);
  std::copy(a.begin(), a.end(), p.rounded.begin());
  std::copy(b.begin(), b.end(), p.rounded.begin() + 3);
  return p;
}

inline PredictedStates predict_states(const MLPModel& model, const std::array<double, 9>& scaled) {
  Vector x(kInputSize);
  for (int i = 0; i < kInputSize; ++i) x(i) = scaled[static_cast<std::size_t>(i)];
  const Vector y = forward(model, x);
  std::array<double, 6> raw{};
  for (int i = 0; i < kOutputSize; ++i) raw[static_cast<std::size_t>(i)] = y(i);
  return round_states(raw);
}

}  // namespace eitqhe::mlp
