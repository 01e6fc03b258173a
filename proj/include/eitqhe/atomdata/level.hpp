#pragma once

#include <cmath>
#include <compare>
#include <cstdlib>
#include <string>

#include <fmt/format.h>

#include "eitqhe/error.hpp"

namespace eitqhe::atomdata {

/// One fine-structure level (n, l, j) of a single-valence-electron atom.
/// j is held doubled so half-odd values stay exact.
struct LevelQN {
  int n = 1;
  int l = 0;
  int j2 = 1;

  double j() const { return 0.5 * j2; }

  bool valid() const {
    return n >= 1 && l >= 0 && l < n && j2 > 0 && (j2 == 2 * l + 1 || j2 == 2 * l - 1);
  }

  auto operator<=>(const LevelQN&) const = default;
};

inline LevelQN make_level(int n, int l, int j2) {
  LevelQN qn{n, l, j2};
  if (!qn.valid()) {
    throw Error(ErrorKind::InvalidLevel, fmt::format("n={} l={} 2j={}", n, l, j2));
  }
  return qn;
}

/// Doubled j from a decimal value such as 2.5; fails unless it is half-odd.
inline int doubled_j(double j) {
  const double twice = 2.0 * j;
  const long rounded = std::lround(twice);
  if (std::abs(twice - static_cast<double>(rounded)) > 1e-9 || rounded % 2 == 0) {
    throw Error(ErrorKind::InvalidLevel, fmt::format("j={} is not half-odd", j));
  }
  return static_cast<int>(rounded);
}

inline char orbital_letter(int l) {
  static constexpr char letters[] = "SPDFGHIKLMNOQRTUV";
  return l >= 0 && l < 17 ? letters[l] : '?';
}

/// Spectroscopic label, e.g. "10P3/2".
inline std::string label(const LevelQN& qn) {
  return fmt::format("{}{}{}/2", qn.n, orbital_letter(qn.l), qn.j2);
}

}  // namespace eitqhe::atomdata
