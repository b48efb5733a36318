#pragma once

// Bessel functions of the first kind, orders 0 and 1, for real x >= 0.
//
// Three regimes:
//   x <= 8      ascending power series
//   8 < x < 25  Miller backward recurrence normalised by J0 + 2*sum J_2k = 1
//   x >= 25     Hankel asymptotic expansion, truncated at the smallest term
// Absolute error is below 1e-13 on [0, 1e4] in double precision.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "helmholtz_cip/error.hpp"

namespace helmholtz_cip::bessel {

inline constexpr double series_limit = 8.0;
inline constexpr double asymptotic_limit = 25.0;
inline constexpr double max_argument = 1.0e4;

namespace detail {

inline void check_argument(double x) {
  if (!std::isfinite(x) || x < 0.0 || x > max_argument) {
    throw Error(ErrorKind::invalid_argument,
                "bessel: argument must be finite and in [0, 1e4], got " + std::to_string(x));
  }
}

// sum_{j>=0} (-1)^j (x/2)^(2j+nu) / (j! (j+nu)!)
inline double series(int nu, double x) {
  const double q = -0.25 * x * x;
  double term = nu == 0 ? 1.0 : 0.5 * x;
  double sum = term;
  for (int j = 1; j < 200; ++j) {
    term *= q / (static_cast<double>(j) * static_cast<double>(j + nu));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

inline std::pair<double, double> miller(double x) {
  // Start index well past the turning point so the seeded J_N is negligible.
  int n_start = static_cast<int>(x + 12.0 * std::cbrt(x) + 30.0);
  if (n_start % 2 != 0) ++n_start;
  double next = 0.0;   // J_{n+1}, unnormalised
  double cur = 1e-30;  // J_n
  double norm = 0.0;
  double j0 = 0.0;
  double j1 = 0.0;
  for (int n = n_start; n > 0; --n) {
    const double prev = 2.0 * n / x * cur - next;  // J_{n-1}
    next = cur;
    cur = prev;
    if (n - 1 == 1) j1 = cur;
    if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * cur;
    // Rescale to avoid overflow for large start indices.
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      j1 *= 1e-250;
    }
  }
  j0 = cur;
  norm += j0;
  return {j0 / norm, j1 / norm};
}

// J_nu(x) ~ sqrt(2/(pi x)) (P cos w - Q sin w), w = x - nu*pi/2 - pi/4.
inline double asymptotic(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double a = 1.0;  // a_k(nu) / x^k
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= (mu - odd * odd) / (8.0 * k * x);
    if (std::abs(a) >= last) break;
    last = std::abs(a);
    // k odd contributes to Q, k even to P, with alternating signs.
    const int pair = k / 2;
    const double sign = (pair % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 1) {
      q += sign * a;
    } else {
      p += sign * a;
    }
    if (last < 1e-17) break;
  }
  // Reduce the phase carefully: x - nu*pi/2 - pi/4.
  const double w = x - (0.5 * nu + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(w) - q * std::sin(w));
}

}  // namespace detail

inline double j0(double x) {
  detail::check_argument(x);
  if (x <= series_limit) return detail::series(0, x);
  if (x < asymptotic_limit) return detail::miller(x).first;
  return detail::asymptotic(0, x);
}

inline double j1(double x) {
  detail::check_argument(x);
  if (x <= series_limit) return detail::series(1, x);
  if (x < asymptotic_limit) return detail::miller(x).second;
  return detail::asymptotic(1, x);
}

}  // namespace helmholtz_cip::bessel
