#pragma once

// CODATA 2018 values, SI units.
namespace eitqhe::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double planck = 6.62607015e-34;
inline constexpr double boltzmann = 1.380649e-23;
inline constexpr double speed_of_light = 299792458.0;
inline constexpr double epsilon0 = 8.8541878128e-12;
inline constexpr double elementary_charge = 1.602176634e-19;
inline constexpr double bohr_radius = 5.29177210903e-11;
inline constexpr double electron_mass = 9.1093837015e-31;
inline constexpr double atomic_mass_unit = 1.66053906660e-27;
// hc R_inf, infinite nuclear mass
inline constexpr double rydberg_energy = 2.1798723611035e-18;

}  // namespace eitqhe::constants
