#pragma once

#include <optional>

#include <fmt/format.h>

#include "eitqhe/atomdata/level.hpp"
#include "eitqhe/atomdata/provider.hpp"
#include "eitqhe/constants.hpp"
#include "eitqhe/error.hpp"
#include "eitqhe/physics/physics.hpp"

namespace eitqhe::physics {

/// One Λ engine: ground |1>, metastable |2>, upper |3>, both baths at t0.
class EngineConfig {
 public:
  /// Validates ordering E1 < E2 < E3 against the provider's energies.
  static EngineConfig make(const atomdata::AtomicDataProvider& provider,
                           const atomdata::LevelQN& level1, const atomdata::LevelQN& level2,
                           const atomdata::LevelQN& level3, double omega_c, double t0,
                           double power = 0.0, double waist = 50e-6, int q = 1) {
    if (!(t0 > 0.0)) throw Error(ErrorKind::InvalidConfig, fmt::format("t0={}", t0));
    if (!(omega_c >= 0.0)) throw Error(ErrorKind::InvalidConfig, fmt::format("omega_c={}", omega_c));
    const double e1 = provider.level_energy(level1);
    const double e2 = provider.level_energy(level2);
    const double e3 = provider.level_energy(level3);
    if (!(e1 < e2 && e2 < e3)) {
      throw Error(ErrorKind::InvalidConfig,
                  fmt::format("levels {} {} {} not in ascending energy", atomdata::label(level1),
                              atomdata::label(level2), atomdata::label(level3)));
    }
    EngineConfig c;
    c.z_ = provider.z();
    c.a_ = provider.a();
    c.level1_ = level1;
    c.level2_ = level2;
    c.level3_ = level3;
    c.omega_c_ = omega_c;
    c.t0_ = t0;
    c.power_ = power;
    c.waist_ = waist;
    c.q_ = q;
    return c;
  }

  int z() const { return z_; }
  int a() const { return a_; }
  const atomdata::LevelQN& level1() const { return level1_; }
  const atomdata::LevelQN& level2() const { return level2_; }
  const atomdata::LevelQN& level3() const { return level3_; }
  double omega_c() const { return omega_c_; }
  double t0() const { return t0_; }
  double power() const { return power_; }
  double waist() const { return waist_; }
  int q() const { return q_; }

  EngineConfig with_omega_c(double omega_c) const {
    if (!(omega_c >= 0.0)) throw Error(ErrorKind::InvalidConfig, fmt::format("omega_c={}", omega_c));
    EngineConfig c = *this;
    c.omega_c_ = omega_c;
    return c;
  }

 private:
  EngineConfig() = default;

  int z_ = 0;
  int a_ = 0;
  atomdata::LevelQN level1_;
  atomdata::LevelQN level2_;
  atomdata::LevelQN level3_;
  double omega_c_ = 0.0;
  double t0_ = 0.0;
  double power_ = 0.0;
  double waist_ = 50e-6;
  int q_ = 1;
};

enum class EngineStatus { Ok, GainThreshold, ZeroBrightness };

/// Evaluated engine. Brightness-derived quantities are empty unless status is Ok.
struct EngineObservables {
  EngineStatus status = EngineStatus::Ok;
  double omega13 = 0.0;
  double omega23 = 0.0;
  double omega_c = 0.0;
  double t0 = 0.0;
  RateSet rates;
  double rho11 = 0.0;
  double rho22 = 0.0;
  double rho33 = 0.0;
  double theta = 0.0;
  double ergotropy = 0.0;  // J
  std::optional<double> b0;
  std::optional<double> t_out;
  std::optional<double> t_ratio;
  std::optional<double> work;
  std::optional<double> t_delta_s;
  std::optional<double> delta_e;
  double tb_bound = 0.0;

  bool ok() const { return status == EngineStatus::Ok; }
};

/// derive_rates -> populations (ergotropy) -> Theta and line-centre brightness
/// -> output temperature -> work and entropy.
inline EngineObservables evaluate_engine(const EngineConfig& config,
                                         const atomdata::AtomicDataProvider& provider,
                                         EntropyConvention convention = EntropyConvention::Main) {
  const auto rec13 = provider.transition(config.level1(), config.level3());
  const auto rec23 = provider.transition(config.level2(), config.level3());

  EngineObservables obs;
  obs.omega13 = rec13.omega;
  obs.omega23 = rec23.omega;
  obs.omega_c = config.omega_c();
  obs.t0 = config.t0();
  obs.rates = derive_rates(rec13, rec23, config.t0(), config.t0());

  const auto pop = steady_state_populations(obs.rates.r13, obs.rates.r23, config.omega_c());
  obs.rho11 = pop.rho11;
  obs.rho22 = pop.rho22;
  obs.rho33 = pop.rho33;
  obs.ergotropy = ergotropy(obs.omega23, pop.rho33, pop.rho22);
  obs.tb_bound = config.t0() * obs.omega13 / (obs.omega13 - obs.omega23);

  // Theta is reported only; the brightness uses its own closed form.
  try {
    obs.theta = theta_closed_form(obs.rates, config.omega_c());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularDenominator) throw;
  }
  double b0 = 0.0;
  try {
    b0 = brightness_line_center(obs.rates, config.omega_c());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::GainThreshold) throw;
    obs.status = EngineStatus::GainThreshold;
    return obs;
  }
  obs.b0 = b0;
  if (!(b0 > 0.0)) {
    obs.status = EngineStatus::ZeroBrightness;
    return obs;
  }
  const auto temp = output_temperature(b0, obs.omega13, config.t0());
  obs.t_out = temp.t_out;
  obs.t_ratio = temp.t_ratio;
  const auto we = work_and_entropy(obs.omega13, obs.omega23, config.t0(), temp.t_out, convention);
  obs.work = we.work;
  obs.t_delta_s = we.t_delta_s;
  obs.delta_e = we.delta_e;
  return obs;
}

}  // namespace eitqhe::physics
