#pragma once

#include <array>
#include <map>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "eitqhe/atomdata/level.hpp"
#include "eitqhe/constants.hpp"
#include "eitqhe/error.hpp"

namespace eitqhe::atomdata {

/// Modified Rydberg-Ritz coefficients: delta(n) = d0 + d2 / (n - d0)^2.
struct DefectCoefficients {
  double d0 = 0.0;
  double d2 = 0.0;
};

struct Isotope {
  int z;
  int a;
  std::string_view symbol;
  double mass_u;  // neutral atom mass
};

// Allowed (Z, A) set. H and Na carry no mass number in the source table; the
// single stable isotope is used for both.
inline constexpr std::array<Isotope, 11> kIsotopes{{
    {1, 1, "H", 1.00782503223},
    {3, 6, "Li", 6.0151228874},
    {3, 7, "Li", 7.0160034366},
    {11, 23, "Na", 22.9897692820},
    {19, 39, "K", 38.9637064864},
    {19, 40, "K", 39.963998166},
    {19, 41, "K", 40.9618252579},
    {37, 85, "Rb", 84.9117897379},
    {37, 87, "Rb", 86.9091805310},
    {55, 133, "Cs", 132.9054519610},
    {55, 137, "Cs", 136.9070895},
}};

inline const Isotope* find_isotope(int z, int a) {
  for (const auto& iso : kIsotopes) {
    if (iso.z == z && iso.a == a) return &iso;
  }
  return nullptr;
}

inline bool is_known_isotope(int z, int a) { return find_isotope(z, a) != nullptr; }

// Embedded defect table, version 1. Rows: (Z, l, 2j, d0, d2). Series above F
// are hydrogenic. Sources: Rb (Li 2003, Mack 2011), Cs (Weber & Sansonetti
// 1987, Goy 1982, Lorenzen & Niemax 1984), Na/K/Li (Lorenzen & Niemax 1983,
// Risberg 1956 fits as tabulated by the ARC project).
inline constexpr int kDefectTableVersion = 1;

struct DefectRow {
  int z;
  int l;
  int j2;
  double d0;
  double d2;
};

inline constexpr std::array<DefectRow, 35> kDefectTable{{
    // Li
    {3, 0, 1, 0.3995101, 0.0290},
    {3, 1, 1, 0.0471835, -0.024},
    {3, 1, 3, 0.0471720, -0.024},
    {3, 2, 3, 0.002129, -0.01491},
    {3, 2, 5, 0.002129, -0.01491},
    {3, 3, 5, -0.000077, 0.021856},
    {3, 3, 7, -0.000077, 0.021856},
    // Na
    {11, 0, 1, 1.3479692, 0.06137},
    {11, 1, 1, 0.855424, 0.1222},
    {11, 1, 3, 0.854608, 0.1220},
    {11, 2, 3, 0.015543, -0.08535},
    {11, 2, 5, 0.015543, -0.08535},
    {11, 3, 5, 0.001663, -0.0069},
    {11, 3, 7, 0.001663, -0.0069},
    // K
    {19, 0, 1, 2.180197, 0.136},
    {19, 1, 1, 1.713892, 0.2332},
    {19, 1, 3, 1.710848, 0.2354},
    {19, 2, 3, 0.276970, -1.0249},
    {19, 2, 5, 0.277158, -1.0256},
    {19, 3, 5, 0.010098, -0.100},
    {19, 3, 7, 0.010098, -0.100},
    // Rb
    {37, 0, 1, 3.1311804, 0.1784},
    {37, 1, 1, 2.6548849, 0.2900},
    {37, 1, 3, 2.6416737, 0.2950},
    {37, 2, 3, 1.34809171, -0.60286},
    {37, 2, 5, 1.34646572, -0.59600},
    {37, 3, 5, 0.0165192, -0.085},
    {37, 3, 7, 0.0165437, -0.086},
    // Cs
    {55, 0, 1, 4.049325, 0.2462},
    {55, 1, 1, 3.591556, 0.3714},
    {55, 1, 3, 3.559058, 0.3740},
    {55, 2, 3, 2.475365, 0.5554},
    {55, 2, 5, 2.466210, 0.0670},
    {55, 3, 5, 0.033392, -0.191},
    {55, 3, 7, 0.033537, -0.191},
}};

// Lowest valence principal number of the S, P, D, F series; lower n are core
// shells. Higher l start at n = l + 1.
struct ValenceFloor {
  int z;
  std::array<int, 4> n_min;
};

inline constexpr std::array<ValenceFloor, 6> kValenceFloors{{
    {1, {1, 2, 3, 4}},
    {3, {2, 2, 3, 4}},
    {11, {3, 3, 3, 4}},
    {19, {4, 4, 3, 4}},
    {37, {5, 5, 4, 4}},
    {55, {6, 6, 5, 4}},
}};

/// Static description of one isotope: mass and quantum-defect series.
struct AtomSpec {
  int z = 1;
  int a = 1;
  double mass = 0.0;  // kg, neutral atom
  std::map<std::pair<int, int>, DefectCoefficients> defect_series;  // key (l, 2j)

  DefectCoefficients coefficients(int l, int j2) const {
    const auto it = defect_series.find({l, j2});
    return it == defect_series.end() ? DefectCoefficients{} : it->second;
  }

  /// Quantum defect delta(n, l, j).
  double quantum_defect(const LevelQN& qn) const {
    const auto c = coefficients(qn.l, qn.j2);
    if (c.d0 == 0.0 && c.d2 == 0.0) return 0.0;
    const double shifted = qn.n - c.d0;
    return c.d0 + c.d2 / (shifted * shifted);
  }

  int lowest_n(int l) const {
    if (l >= 4) return l + 1;
    for (const auto& floor : kValenceFloors) {
      if (floor.z == z) return floor.n_min[static_cast<std::size_t>(l)];
    }
    return l + 1;
  }

  /// True for levels the single-valence-electron model describes.
  bool has_level(const LevelQN& qn) const { return qn.valid() && qn.n >= lowest_n(qn.l); }

  double effective_n(const LevelQN& qn) const { return qn.n - quantum_defect(qn); }

  /// Rydberg energy scaled to the reduced mass of valence electron and ion core.
  double rydberg_mass_corrected() const {
    const double core = mass - constants::electron_mass;
    return constants::rydberg_energy * core / (core + constants::electron_mass);
  }

  std::string_view symbol() const {
    const auto* iso = find_isotope(z, a);
    return iso ? iso->symbol : std::string_view{"?"};
  }
};

inline AtomSpec make_atom(int z, int a) {
  const auto* iso = find_isotope(z, a);
  if (iso == nullptr) {
    throw Error(ErrorKind::UnknownIsotope, fmt::format("Z={} A={}", z, a));
  }
  AtomSpec spec;
  spec.z = z;
  spec.a = a;
  spec.mass = iso->mass_u * constants::atomic_mass_unit;
  for (const auto& row : kDefectTable) {
    if (row.z == z) spec.defect_series[{row.l, row.j2}] = {row.d0, row.d2};
  }
  return spec;
}

}  // namespace eitqhe::atomdata
