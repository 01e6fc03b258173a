#pragma once

#include <cmath>

#include <fmt/format.h>

#include "eitqhe/atomdata/provider.hpp"
#include "eitqhe/constants.hpp"
#include "eitqhe/error.hpp"

// Λ-type EIT engine physics. Frequencies and rates are angular (rad/s, 1/s);
// the coupling Rabi frequency enters the population equations additively with
// the pump rate R23.
namespace eitqhe::physics {

/// Bose occupation {exp[hbar w / (k T)] - 1}^-1.
inline double thermal_occupation(double omega, double temperature) {
  if (!(omega > 0.0) || !(temperature > 0.0)) {
    throw Error(ErrorKind::NonPositiveInput,
                fmt::format("thermal_occupation omega={} T={}", omega, temperature));
  }
  const double x = constants::hbar * omega / (constants::boltzmann * temperature);
  return 1.0 / std::expm1(x);
}

struct RateSet {
  double r13 = 0.0;
  double r23 = 0.0;
  double gamma21 = 0.0;  // dephasing rates
  double gamma31 = 0.0;
  double gamma32 = 0.0;
  double nbar13 = 0.0;
  double nbar23 = 0.0;
  double big_gamma31 = 0.0;  // lifetime decay rates
  double big_gamma32 = 0.0;
};

/// Completes a RateSet from decay rates and occupations: R = Gamma nbar plus
/// the three dephasing identities.
inline RateSet make_rate_set(double big_gamma31, double big_gamma32, double nbar13,
                             double nbar23) {
  RateSet r;
  r.big_gamma31 = big_gamma31;
  r.big_gamma32 = big_gamma32;
  r.nbar13 = nbar13;
  r.nbar23 = nbar23;
  r.r13 = big_gamma31 * nbar13;
  r.r23 = big_gamma32 * nbar23;
  r.gamma21 = r.r23 + r.r13;
  r.gamma31 = big_gamma31 + big_gamma32 + r.r23 + 2.0 * r.r13;
  r.gamma32 = big_gamma31 + big_gamma32 + r.r13 + 2.0 * r.r23;
  return r;
}

inline RateSet derive_rates(double omega13, double big_gamma31, double omega23, double big_gamma32,
                            double t13, double t23) {
  return make_rate_set(big_gamma31, big_gamma32, thermal_occupation(omega13, t13),
                       thermal_occupation(omega23, t23));
}

/// Rates from the 1<->3 and 2<->3 transition records and the two bath temperatures.
inline RateSet derive_rates(const atomdata::TransitionRecord& t13rec,
                            const atomdata::TransitionRecord& t23rec, double t13, double t23) {
  return derive_rates(t13rec.omega, t13rec.gamma, t23rec.omega, t23rec.gamma, t13, t23);
}

struct Populations {
  double rho11 = 0.0;
  double rho22 = 0.0;
  double rho33 = 0.0;
};

/// Steady state of the rate equations
///   R13 (rho33 - rho11) = 0
///   R23 rho33 - (R23 + Omega) rho22 = 0
///   rho11 + rho22 + rho33 = 1.
inline Populations steady_state_populations(double r13, double r23, double omega_c) {
  if (r13 < 0.0 || r23 < 0.0 || omega_c < 0.0) {
    throw Error(ErrorKind::NonPositiveInput, "negative rate or Rabi frequency");
  }
  const double denom = 3.0 * r23 + 2.0 * omega_c;
  if (!(denom > 0.0)) {
    throw Error(ErrorKind::DegenerateSystem, "R23 and Omega_C both zero");
  }
  Populations p;
  p.rho33 = (r23 + omega_c) / denom;
  p.rho11 = p.rho33;
  p.rho22 = r23 / denom;
  return p;
}

/// Upper-manifold ratio (rho22 + rho33) / rho11 from the density-matrix solution.
inline double theta_closed_form(const RateSet& r, double omega_c) {
  const double w2 = omega_c * omega_c;
  const double denom = (r.big_gamma31 + r.r13) * (w2 + r.gamma32 * r.r23);
  if (!(denom > 0.0)) {
    throw Error(ErrorKind::SingularDenominator, "theta denominator is not positive");
  }
  return r.r13 * (2.0 * w2 + r.gamma32 * (r.big_gamma32 + 2.0 * r.r23)) / denom;
}

struct CrossSections {
  double absorption = 0.0;  // sigma_abs / sigma_0
  double emission = 0.0;    // sigma_em / sigma_0
};

inline CrossSections cross_sections(double delta_omega, const RateSet& r, double omega_c) {
  const double w2 = omega_c * omega_c;
  const double d2 = delta_omega * delta_omega;
  const double g21 = r.gamma21;
  const double g31 = r.gamma31;
  const double coupled = w2 + g21 * g31;
  const double lorentz =
      4.0 * d2 * (-2.0 * w2 + g21 * g21 + g31 * g31) + coupled * coupled + 16.0 * d2 * d2;
  const double pump = r.gamma32 * r.big_gamma32 + 2.0 * w2 + 2.0 * r.gamma32 * r.r23;
  if (lorentz == 0.0 || pump == 0.0) {
    throw Error(ErrorKind::SingularDenominator, "cross-section denominator vanishes");
  }
  CrossSections cs;
  cs.absorption = g31 * (g21 * w2 + g31 * (g21 * g21 + 4.0 * d2)) / lorentz;
  cs.emission = (g31 * r.big_gamma32 * w2 * (coupled - 4.0 * d2) +
                 g31 * (g21 * coupled + 4.0 * g31 * d2) * (w2 + r.gamma32 * r.r23)) /
                (lorentz * pump);
  return cs;
}

/// sigma_0 = 2 w13 |mu13|^2 / (eps0 c hbar gamma13), m^2.
inline double sigma0(double omega13, double dipole13, double gamma13) {
  using namespace constants;
  if (!(gamma13 > 0.0)) throw Error(ErrorKind::SingularDenominator, "gamma13 must be positive");
  return 2.0 * omega13 * dipole13 * dipole13 / (epsilon0 * speed_of_light * hbar * gamma13);
}

/// Saturated line-centre brightness in closed form. Zero for a frozen 1-3 bath.
inline double brightness_line_center(const RateSet& r, double omega_c) {
  const double w2 = omega_c * omega_c;
  const double pumped = r.gamma32 * r.big_gamma32 * r.nbar23;
  const double numer = r.nbar13 * (r.gamma21 * pumped + (r.gamma21 + r.big_gamma32) * w2);
  const double denom = r.big_gamma32 * r.nbar13 * w2 - r.gamma21 * (pumped + w2);
  if (denom == 0.0 || !std::isfinite(denom)) {
    throw Error(ErrorKind::GainThreshold, "line-centre denominator vanishes");
  }
  const double b = -numer / denom;
  if (!std::isfinite(b) || b < 0.0) {
    throw Error(ErrorKind::GainThreshold, fmt::format("line-centre brightness {}", b));
  }
  return b == 0.0 ? 0.0 : b;
}

/// B = Theta sigma_em / (sigma_abs - Theta sigma_em) at detuning delta_omega.
inline double brightness_spectrum(double delta_omega, const RateSet& r, double omega_c) {
  const double theta = theta_closed_form(r, omega_c);
  const auto cs = cross_sections(delta_omega, r, omega_c);
  const double emitted = theta * cs.emission;
  if (!(cs.absorption > emitted)) {
    throw Error(ErrorKind::GainRegime,
                fmt::format("sigma_abs={} <= Theta*sigma_em={}", cs.absorption, emitted));
  }
  return emitted / (cs.absorption - emitted);
}

struct PropagationSpec {
  double number_density = 0.0;  // 1/m^3
  double length = 0.0;          // m
  double detuning = 0.0;        // rad/s, for the record
};

/// Solution of dB/dz + alpha B = N sigma_em (rho22 + rho33) with B(0) = 0,
/// alpha = N (sigma_abs rho11 - sigma_em (rho22 + rho33)).
inline double brightness_vs_z(const PropagationSpec& spec, const Populations& pop,
                              double sigma_abs, double sigma_em) {
  if (spec.number_density < 0.0 || spec.length < 0.0) {
    throw Error(ErrorKind::NonPositiveInput, "negative density or length");
  }
  const double upper = pop.rho22 + pop.rho33;
  const double alpha = spec.number_density * (sigma_abs * pop.rho11 - sigma_em * upper);
  if (!(alpha > 0.0)) {
    throw Error(ErrorKind::GainRegime, fmt::format("absorption coefficient {}", alpha));
  }
  const double source = spec.number_density * sigma_em * upper;
  return -(source / alpha) * std::expm1(-alpha * spec.length);
}

struct OutputTemperature {
  double t_out = 0.0;
  double t_ratio = 0.0;
};

/// Temperature whose Bose occupation at w13 equals the brightness.
inline OutputTemperature output_temperature(double b0, double omega13, double t0) {
  if (!(b0 > 0.0)) {
    throw Error(ErrorKind::NonPositiveBrightness, fmt::format("brightness {}", b0));
  }
  if (!(omega13 > 0.0) || !(t0 > 0.0)) {
    throw Error(ErrorKind::NonPositiveInput, "omega13 and T0 must be positive");
  }
  OutputTemperature out;
  out.t_out = constants::hbar * omega13 / (constants::boltzmann * std::log1p(1.0 / b0));
  out.t_ratio = out.t_out / t0;
  return out;
}

/// hbar w23 (rho33 - rho22), J. Negative for passive-dominant populations.
inline double ergotropy(double omega23, double rho33, double rho22) {
  return constants::hbar * omega23 * (rho33 - rho22);
}

enum class EntropyConvention { Main, Supplementary };

struct WorkEntropy {
  double work = 0.0;       // J
  double delta_e = 0.0;    // hbar w13, J
  double t_delta_s = 0.0;  // T dS, J
  double tb_bound = 0.0;   // K
};

/// W = dE - T dS with dE = hbar w13. The main convention takes
/// dS = -hbar w13/T0 - hbar w23/T0 - hbar w13/T; the supplementary one flips
/// the signs of the last two terms.
inline WorkEntropy work_and_entropy(double omega13, double omega23, double t0, double t_out,
                                    EntropyConvention convention = EntropyConvention::Main) {
  if (!(omega13 > omega23)) {
    throw Error(ErrorKind::InvalidFrequencies,
                fmt::format("omega13={} must exceed omega23={}", omega13, omega23));
  }
  if (!(t0 > 0.0) || !(t_out > 0.0)) {
    throw Error(ErrorKind::NonPositiveInput, "temperatures must be positive");
  }
  const double e13 = constants::hbar * omega13;
  const double e23 = constants::hbar * omega23;
  const double sign = convention == EntropyConvention::Main ? -1.0 : 1.0;
  const double delta_s = -e13 / t0 + sign * e23 / t0 + sign * e13 / t_out;
  WorkEntropy w;
  w.delta_e = e13;
  w.t_delta_s = t_out * delta_s;
  w.work = w.delta_e - w.t_delta_s;
  w.tb_bound = t0 * omega13 / (omega13 - omega23);
  return w;
}

}  // namespace eitqhe::physics
