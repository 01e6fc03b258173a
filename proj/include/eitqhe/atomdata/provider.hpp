#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "eitqhe/atomdata/angular.hpp"
#include "eitqhe/atomdata/atom.hpp"
#include "eitqhe/atomdata/level.hpp"
#include "eitqhe/atomdata/radial.hpp"
#include "eitqhe/constants.hpp"
#include "eitqhe/error.hpp"

namespace eitqhe::atomdata {

/// One dipole transition, angular frequency in rad/s.
struct TransitionRecord {
  LevelQN lower;
  LevelQN upper;
  double omega = 0.0;
  double gamma = 0.0;
  double dipole = 0.0;  // C m
  bool forbidden = false;

  bool operator==(const TransitionRecord&) const = default;
};

enum class SelectionPolicy { Permissive, Strict };

enum class SourceTag { Builtin, File };

inline constexpr double kForbiddenScale = 1e-3;

/// Spontaneous decay rate from a dipole element.
inline double decay_rate(double omega, double dipole) {
  using namespace constants;
  return omega * omega * omega * dipole * dipole /
         (3.0 * pi * epsilon0 * hbar * speed_of_light * speed_of_light * speed_of_light);
}

/// Peak field of a Gaussian beam, V/m.
inline double gaussian_peak_field(double power, double waist) {
  using namespace constants;
  return std::sqrt(4.0 * power / (pi * epsilon0 * speed_of_light * waist * waist));
}

/// Pure lookup interface over atomic data. Implementations are immutable after
/// construction and safe to share across threads.
class AtomicDataProvider {
 public:
  virtual ~AtomicDataProvider() = default;

  virtual SourceTag source() const = 0;
  virtual int z() const = 0;
  virtual int a() const = 0;

  /// Bound-state energy in J (negative).
  virtual double level_energy(const LevelQN& qn) const = 0;

  virtual TransitionRecord transition(const LevelQN& lower, const LevelQN& upper) const = 0;

  /// Coupling Rabi frequency in rad/s for a Gaussian beam. The polarization
  /// index is carried for the record; the stored dipole already fixes q = +1.
  double rabi_frequency(const LevelQN& lower, const LevelQN& upper, double power, double waist,
                        int q = 1) const {
    (void)q;
    if (!(power >= 0.0) || !(waist > 0.0)) {
      throw Error(ErrorKind::NonPositiveInput,
                  fmt::format("rabi_frequency power={} waist={}", power, waist));
    }
    const auto rec = transition(lower, upper);
    return rec.dipole * gaussian_peak_field(power, waist) / constants::hbar;
  }
};

inline double level_energy(const AtomicDataProvider& p, const LevelQN& qn) {
  return p.level_energy(qn);
}

inline TransitionRecord transition(const AtomicDataProvider& p, const LevelQN& lower,
                                   const LevelQN& upper) {
  return p.transition(lower, upper);
}

inline double rabi_frequency(const AtomicDataProvider& p, const LevelQN& lower,
                             const LevelQN& upper, double power, double waist, int q = 1) {
  return p.rabi_frequency(lower, upper, power, waist, q);
}

/// Reduced element <l j || r || l' j'> in Bohr radii (ARC phase convention),
/// excluding the radial integral.
inline double angular_factor_reduced(int l, int j2, int lp, int jp2) {
  const int s2 = 1;
  const double ang_l = std::pow(-1.0, l) * std::sqrt((2.0 * l + 1) * (2.0 * lp + 1)) *
                       angular::wigner3j(2 * l, 2, 2 * lp, 0, 0, 0);
  const int phase = (2 * l + s2 + jp2 + 2) / 2;
  const double ang_j = std::pow(-1.0, phase) * std::sqrt((j2 + 1.0) * (jp2 + 1.0)) *
                       angular::wigner6j(2 * l, j2, s2, jp2, 2 * lp, 2);
  return ang_l * ang_j;
}

/// Stretched-state factor for q = +1: |<j_up, m+1| d_{+1} | j_lo, m>| / <||d||>
/// with m = min(j_lo, j_up - 1).
inline double stretched_factor(int j2_lo, int j2_up) {
  const int m2_lo = std::min(j2_lo, j2_up - 2);
  if (m2_lo < -j2_lo) return 0.0;
  const int m2_up = m2_lo + 2;
  return std::abs(angular::wigner3j(j2_up, 2, j2_lo, -m2_up, 2, m2_lo));
}

/// Quantum-defect model: Rydberg-Ritz energies, Coulomb-approximation dipoles.
class BuiltinProvider final : public AtomicDataProvider {
 public:
  explicit BuiltinProvider(AtomSpec spec, SelectionPolicy policy = SelectionPolicy::Permissive)
      : spec_(std::move(spec)), policy_(policy), cache_(std::make_shared<Cache>()) {}

  SourceTag source() const override { return SourceTag::Builtin; }
  int z() const override { return spec_.z; }
  int a() const override { return spec_.a; }
  const AtomSpec& spec() const { return spec_; }
  SelectionPolicy policy() const { return policy_; }

  double level_energy(const LevelQN& qn) const override {
    if (!spec_.has_level(qn)) throw Error(ErrorKind::MissingLevel, label(qn));
    const double n_eff = spec_.effective_n(qn);
    if (!(n_eff > 0.0)) throw Error(ErrorKind::MissingLevel, label(qn));
    return -spec_.rydberg_mass_corrected() / (n_eff * n_eff);
  }

  /// Reduced dipole matrix element in C m, signed.
  double reduced_dipole(const LevelQN& lower, const LevelQN& upper) const {
    const double radial = radial_element(lower, upper);
    return angular_factor_reduced(upper.l, upper.j2, lower.l, lower.j2) * radial *
           constants::elementary_charge * constants::bohr_radius;
  }

  TransitionRecord transition(const LevelQN& lower, const LevelQN& upper) const override {
    const double e_lo = level_energy(lower);
    const double e_up = level_energy(upper);
    if (!(e_up > e_lo)) {
      throw Error(ErrorKind::NotUpward,
                  fmt::format("{} -> {}", label(lower), label(upper)));
    }
    TransitionRecord rec;
    rec.lower = lower;
    rec.upper = upper;
    rec.omega = (e_up - e_lo) / constants::hbar;

    double dipole = allowed_dipole(lower, upper);
    if (dipole == 0.0) {
      rec.forbidden = true;
      if (policy_ == SelectionPolicy::Permissive) {
        if (const auto proxy = nearest_allowed_upper(lower, upper)) {
          dipole = kForbiddenScale * allowed_dipole(lower, *proxy);
        }
      }
    }
    rec.dipole = dipole;
    rec.gamma = decay_rate(rec.omega, dipole);
    return rec;
  }

 private:
  struct Cache {
    std::mutex mutex;
    std::map<LevelQN, std::shared_ptr<const RadialWavefunction>> waves;
  };

  std::shared_ptr<const RadialWavefunction> wavefunction(const LevelQN& qn) const {
    {
      std::lock_guard lock(cache_->mutex);
      if (auto it = cache_->waves.find(qn); it != cache_->waves.end()) return it->second;
    }
    auto wf = std::make_shared<const RadialWavefunction>(
        coulomb_wavefunction(spec_.effective_n(qn), qn.l));
    std::lock_guard lock(cache_->mutex);
    return cache_->waves.emplace(qn, std::move(wf)).first->second;
  }

  double radial_element(const LevelQN& a, const LevelQN& b) const {
    return radial_integral(*wavefunction(a), *wavefunction(b));
  }

  double allowed_dipole(const LevelQN& lower, const LevelQN& upper) const {
    if (std::abs(upper.l - lower.l) != 1 || std::abs(upper.j2 - lower.j2) > 2) return 0.0;
    const double reduced = reduced_dipole(lower, upper);
    return std::abs(reduced) * stretched_factor(lower.j2, upper.j2);
  }

  // Closest dipole-allowed stand-in for the upper level: same n, l' = l_lo +- 1
  // nearest to l_up, then j' nearest to j_up.
  std::optional<LevelQN> nearest_allowed_upper(const LevelQN& lower, const LevelQN& upper) const {
    std::optional<LevelQN> best;
    int best_dl = 0;
    int best_dj = 0;
    for (int lp : {lower.l - 1, lower.l + 1}) {
      if (lp < 0 || lp >= upper.n) continue;
      for (int jp2 : {2 * lp - 1, 2 * lp + 1}) {
        const LevelQN cand{upper.n, lp, jp2};
        if (!cand.valid() || std::abs(jp2 - lower.j2) > 2) continue;
        if (stretched_factor(lower.j2, jp2) == 0.0) continue;
        const int dl = std::abs(lp - upper.l);
        const int dj = std::abs(jp2 - upper.j2);
        if (!best || dl < best_dl || (dl == best_dl && dj < best_dj)) {
          best = cand;
          best_dl = dl;
          best_dj = dj;
        }
      }
    }
    return best;
  }

  AtomSpec spec_;
  SelectionPolicy policy_;
  std::shared_ptr<Cache> cache_;
};

inline std::unique_ptr<BuiltinProvider> builtin_provider(
    int z, int a, SelectionPolicy policy = SelectionPolicy::Permissive) {
  return std::make_unique<BuiltinProvider>(make_atom(z, a), policy);
}

}  // namespace eitqhe::atomdata
