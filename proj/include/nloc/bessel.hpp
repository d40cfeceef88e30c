#pragma once

// Integer-order Bessel functions of the first kind and their positive zeros.

#include <cmath>
#include <cstdlib>
#include <vector>

#include "nloc/error.hpp"

namespace nloc::bessel {

namespace detail {

// J_n(x) for n >= 2, x > 0 by Miller's downward recurrence, normalised with
// 1 = J_0 + 2 Σ J_{2k}.
inline double miller(int n, double x) {
  const int start = 2 * ((std::max(n, static_cast<int>(x)) + 20 +
                          static_cast<int>(std::sqrt(60.0 * std::max(n, static_cast<int>(x))))) / 2);
  const double two_over_x = 2.0 / x;
  double jp = 0.0, j = 1e-300, result = 0.0, sum = 0.0;
  for (int k = start; k > 0; --k) {
    const double jm = k * two_over_x * j - jp;
    jp = j;
    j = jm;
    if (std::abs(j) > 1e250) {
      j *= 1e-250;
      jp *= 1e-250;
      result *= 1e-250;
      sum *= 1e-250;
    }
    if (k - 1 == n) result = j;
    if ((k - 1) % 2 == 0 && k - 1 > 0) sum += j;
  }
  // j now holds the unnormalised J_0.
  return result / (j + 2.0 * sum);
}

}  // namespace detail

/// J_n(x) for integer n and real x.
inline double j(int n, double x) {
  if (n < 0) return (n % 2 == 0 ? 1.0 : -1.0) * j(-n, x);
  if (x < 0) return (n % 2 == 0 ? 1.0 : -1.0) * j(n, -x);
  if (n == 0) return std::cyl_bessel_j(0.0, x);
  if (n == 1) return std::cyl_bessel_j(1.0, x);
  if (x == 0.0) return 0.0;
  if (x > n) {
    double jm = std::cyl_bessel_j(0.0, x);
    double jc = std::cyl_bessel_j(1.0, x);
    for (int k = 1; k < n; ++k) {
      const double jn = 2.0 * k / x * jc - jm;
      jm = jc;
      jc = jn;
    }
    return jc;
  }
  return detail::miller(n, x);
}

/// d/dx J_n(x).
inline double jprime(int n, double x) {
  if (n == 0) return -j(1, x);
  return 0.5 * (j(n - 1, x) - j(n + 1, x));
}

/// First `count` positive zeros of J_|n|, by a sign-change scan and
/// bracketed Newton refinement.
inline std::vector<double> zeros(int n, int count) {
  n = std::abs(n);
  if (count < 0) throw SizeError("negative zero count");
  std::vector<double> out;
  out.reserve(count);
  constexpr double kStep = 0.25;  // zeros are at least ~2.4 apart
  double a = std::max(static_cast<double>(n), 1e-3);
  double fa = j(n, a);
  while (static_cast<int>(out.size()) < count) {
    const double b = a + kStep;
    const double fb = j(n, b);
    if (fa == 0.0) {
      out.push_back(a);
    } else if (fa * fb < 0.0) {
      double lo = a, hi = b, flo = fa;
      double x = 0.5 * (lo + hi);
      for (int it = 0; it < 100; ++it) {
        const double fx = j(n, x);
        if (fx == 0.0) break;
        if ((fx < 0.0) == (flo < 0.0)) {
          lo = x;
          flo = fx;
        } else {
          hi = x;
        }
        double next = x - fx / jprime(n, x);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-15 * x) {
          x = next;
          break;
        }
        x = next;
      }
      out.push_back(x);
    }
    a = b;
    fa = fb;
  }
  return out;
}

}  // namespace nloc::bessel
