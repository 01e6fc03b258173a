#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>

// Wigner 3j and 6j symbols via the Racah formulas. All angular momenta are
// passed doubled (2j) so half-integers stay exact.
namespace eitqhe::atomdata::angular {

namespace detail {

inline long double factorial(int k) {
  long double f = 1.0L;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Triangle coefficient Delta(abc) for doubled arguments; 0 when not a triangle.
inline long double triangle(int a2, int b2, int c2) {
  if ((a2 + b2 + c2) % 2 != 0) return 0.0L;
  if (c2 > a2 + b2 || c2 < std::abs(a2 - b2)) return 0.0L;
  return factorial((a2 + b2 - c2) / 2) * factorial((a2 - b2 + c2) / 2) *
         factorial((-a2 + b2 + c2) / 2) / factorial((a2 + b2 + c2) / 2 + 1);
}

inline int parity(int k) { return (k % 2 == 0) ? 1 : -1; }

}  // namespace detail

/// (j1 j2 j3; m1 m2 m3), doubled arguments.
inline double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  using detail::factorial;
  if (m1 + m2 + m3 != 0) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
  if ((j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (j3 + m3) % 2 != 0) return 0.0;
  const long double tri = detail::triangle(j1, j2, j3);
  if (tri == 0.0L) return 0.0;

  const int kmin = std::max({0, (j2 - j3 - m1) / 2, (j1 - j3 + m2) / 2});
  const int kmax = std::min({(j1 + j2 - j3) / 2, (j1 - m1) / 2, (j2 + m2) / 2});
  long double sum = 0.0L;
  for (int k = kmin; k <= kmax; ++k) {
    const long double denom = factorial(k) * factorial((j3 - j2 + m1) / 2 + k) *
                              factorial((j3 - j1 - m2) / 2 + k) *
                              factorial((j1 + j2 - j3) / 2 - k) * factorial((j1 - m1) / 2 - k) *
                              factorial((j2 + m2) / 2 - k);
    sum += detail::parity(k) / denom;
  }
  const long double pre =
      std::sqrt(tri * factorial((j1 + m1) / 2) * factorial((j1 - m1) / 2) *
                factorial((j2 + m2) / 2) * factorial((j2 - m2) / 2) * factorial((j3 + m3) / 2) *
                factorial((j3 - m3) / 2));
  return static_cast<double>(detail::parity((j1 - j2 - m3) / 2) * pre * sum);
}

/// {j1 j2 j3; j4 j5 j6}, doubled arguments.
inline double wigner6j(int j1, int j2, int j3, int j4, int j5, int j6) {
  using detail::factorial;
  const long double t1 = detail::triangle(j1, j2, j3);
  const long double t2 = detail::triangle(j1, j5, j6);
  const long double t3 = detail::triangle(j4, j2, j6);
  const long double t4 = detail::triangle(j4, j5, j3);
  if (t1 == 0.0L || t2 == 0.0L || t3 == 0.0L || t4 == 0.0L) return 0.0;

  const int a1 = (j1 + j2 + j3) / 2;
  const int a2 = (j1 + j5 + j6) / 2;
  const int a3 = (j4 + j2 + j6) / 2;
  const int a4 = (j4 + j5 + j3) / 2;
  const int b1 = (j1 + j2 + j4 + j5) / 2;
  const int b2 = (j2 + j3 + j5 + j6) / 2;
  const int b3 = (j3 + j1 + j6 + j4) / 2;
  const int tmin = std::max({a1, a2, a3, a4});
  const int tmax = std::min({b1, b2, b3});
  long double sum = 0.0L;
  for (int t = tmin; t <= tmax; ++t) {
    const long double denom = factorial(t - a1) * factorial(t - a2) * factorial(t - a3) *
                              factorial(t - a4) * factorial(b1 - t) * factorial(b2 - t) *
                              factorial(b3 - t);
    sum += detail::parity(t) * factorial(t + 1) / denom;
  }
  return static_cast<double>(std::sqrt(t1 * t2 * t3 * t4) * sum);
}

}  // namespace eitqhe::atomdata::angular
