#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace eitqhe::atomdata {

/// Radial wavefunction in the Coulomb approximation, tabulated on x = sqrt(r)
/// (r in Bohr radii). Values are X(x) = x^{3/2} R(r), normalised so that
/// 2 * sum X^2 x^2 dx = 1. Entries below `first` are zero.
struct RadialWavefunction {
  double step = 0.0;
  std::size_t first = 0;
  std::vector<double> values;

  double x(std::size_t i) const { return step * static_cast<double>(i); }
};

/// Integrates the Coulomb radial equation inward at energy -1/(2 n*^2).
/// For non-integer n* the solution regular at infinity diverges at the origin;
/// integration stops once |X| starts growing inside the inner turning point.
inline RadialWavefunction coulomb_wavefunction(double n_eff, int l, double step = 0.005) {
  const double r_max = 2.0 * n_eff * (n_eff + 15.0);
  const auto count = static_cast<std::size_t>(std::ceil(std::sqrt(r_max) / step)) + 2;
  const double centrifugal = (2.0 * l + 0.5) * (2.0 * l + 1.5);
  const double inv_n2 = 1.0 / (n_eff * n_eff);

  // X'' = g(x) X
  auto g = [&](double x) { return centrifugal / (x * x) - 8.0 + 4.0 * x * x * inv_n2; };

  // inner classical turning point of l(l+1)/2r^2 - 1/r = -1/(2 n*^2)
  const double ll = static_cast<double>(l) * (l + 1);
  const double r_turn = n_eff * n_eff * (1.0 - std::sqrt(std::max(0.0, 1.0 - ll * inv_n2)));
  const double x_turn = std::sqrt(r_turn);

  RadialWavefunction wf;
  wf.step = step;
  wf.values.assign(count, 0.0);
  const double h2 = step * step / 12.0;

  std::size_t i = count - 1;
  wf.values[i] = 0.0;
  wf.values[i - 1] = 1e-30;
  std::size_t stop = 1;
  for (i = count - 2; i >= 2; --i) {
    const double xm = wf.x(i - 1);
    const double x0 = wf.x(i);
    const double xp = wf.x(i + 1);
    const double next = (2.0 * wf.values[i] * (1.0 + 5.0 * h2 * g(x0)) -
                         wf.values[i + 1] * (1.0 - h2 * g(xp))) /
                        (1.0 - h2 * g(xm));
    wf.values[i - 1] = next;
    if (xm < x_turn && std::abs(next) > std::abs(wf.values[i])) {
      stop = i;
      break;
    }
    // rescale to avoid overflow in the classically forbidden outer region
    if (std::abs(next) > 1e200) {
      for (std::size_t k = i - 1; k < count; ++k) wf.values[k] *= 1e-200;
    }
  }
  for (std::size_t k = 0; k < stop; ++k) wf.values[k] = 0.0;
  wf.first = stop;

  double norm = 0.0;
  for (std::size_t k = stop; k < count; ++k) {
    const double x = wf.x(k);
    norm += wf.values[k] * wf.values[k] * x * x;
  }
  norm = std::sqrt(2.0 * norm * step);
  for (auto& v : wf.values) v /= norm;
  return wf;
}

/// <a| r |b> in Bohr radii for two wavefunctions on the same step.
inline double radial_integral(const RadialWavefunction& a, const RadialWavefunction& b) {
  const std::size_t lo = std::max(a.first, b.first);
  const std::size_t hi = std::min(a.values.size(), b.values.size());
  double sum = 0.0;
  for (std::size_t k = lo; k < hi; ++k) {
    const double x = a.x(k);
    const double x2 = x * x;
    sum += a.values[k] * b.values[k] * x2 * x2;
  }
  return 2.0 * sum * a.step;
}

}  // namespace eitqhe::atomdata
