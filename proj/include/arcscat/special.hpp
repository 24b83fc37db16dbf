#pragma once

// Bessel J0, J1, Y0, Y1 and the smooth single-layer kernel combinations
//   G(z)  = (i/4) H0(z) + (1/2pi) J0(z) ln z
//   G1(z) = (i/4) H1(z) + (1/2pi) J1(z) ln z - 1/(2pi z)
// computed without log/pole cancellation at small argument.
//
// Ascending series (DLMF 10.2.2, 10.8.1) for x <= 12, Hankel asymptotic
// expansions (DLMF 10.17) beyond; series accumulate in long double.
// Absolute accuracy ~1e-11 or better across (0, 1e3].

#include <cmath>
#include <stdexcept>

#include "core.hpp"

namespace arcscat {

namespace detail {

inline constexpr double bessel_crossover = 14.0;

inline long double j0_series_ld(double x) {
  long double q = static_cast<long double>(x) * x / 4.0L;
  long double term = 1.0L, sum = 1.0L;
  for (int m = 1; m < 64; ++m) {
    term *= -q / (static_cast<long double>(m) * m);
    sum += term;
    if (fabsl(term) < 1e-21L * (1.0L + fabsl(sum))) break;
  }
  return sum;
}

inline long double j1_series_ld(double x) {
  long double q = static_cast<long double>(x) * x / 4.0L;
  long double term = 1.0L, sum = 1.0L;
  for (int m = 1; m < 64; ++m) {
    term *= -q / (static_cast<long double>(m) * (m + 1));
    sum += term;
    if (fabsl(term) < 1e-21L * (1.0L + fabsl(sum))) break;
  }
  return 0.5L * x * sum;
}

// S0(x) = sum_{k>=1} (-1)^{k+1} H_k (x^2/4)^k / (k!)^2
inline long double s0_series_ld(double x) {
  long double q = static_cast<long double>(x) * x / 4.0L;
  long double fac = 1.0L, H = 0.0L, sum = 0.0L, sign = 1.0L;
  for (int k = 1; k < 64; ++k) {
    fac *= q / (static_cast<long double>(k) * k);
    H += 1.0L / k;
    long double term = sign * H * fac;
    sum += term;
    sign = -sign;
    if (fac * (H + 1.0L) < 1e-21L * (1.0L + fabsl(sum))) break;
  }
  return sum;
}

// S1(x) = sum_{k>=0} (H_k + H_{k+1}) (-x^2/4)^k / (k!(k+1)!)
inline long double s1_series_ld(double x) {
  long double q = static_cast<long double>(x) * x / 4.0L;
  long double fac = 1.0L, sum = 1.0L;  // k = 0 term: (H_0+H_1) = 1
  long double H = 0.0L, Hn = 1.0L, sign = -1.0L;
  for (int k = 1; k < 64; ++k) {
    fac *= q / (static_cast<long double>(k) * (k + 1));
    H += 1.0L / k;
    Hn += 1.0L / (k + 1);
    long double term = sign * (H + Hn) * fac;
    sum += term;
    sign = -sign;
    if (fac * (H + Hn + 1.0L) < 1e-21L * (1.0L + fabsl(sum))) break;
  }
  return sum;
}

// P,Q amplitude series of the Hankel expansion, mu = 4 nu^2; truncated at
// the smallest term.
inline void bessel_pq(double mu, double x, double& P, double& Q) {
  long double T = 1.0L, Pa = 0.0L, Qa = 0.0L, prev = 1e300L;
  for (int m = 0; m < 64; ++m) {
    long double aT = fabsl(T);
    if (aT > prev) break;
    prev = aT;
    switch (m % 4) {
      case 0: Pa += T; break;
      case 1: Qa += T; break;
      case 2: Pa -= T; break;
      default: Qa -= T; break;
    }
    T *= (mu - (2.0L * m + 1) * (2.0L * m + 1)) / ((m + 1) * 8.0L * x);
    if (aT < 1e-21L) break;
  }
  P = static_cast<double>(Pa);
  Q = static_cast<double>(Qa);
}

struct JY { double j, y; };

inline JY jy_asymptotic(int nu, double x) {
  double P, Q;
  bessel_pq(4.0 * nu * nu, x, P, Q);
  double chi = x - (0.5 * nu + 0.25) * pi;
  double c = std::sqrt(2.0 / (pi * x));
  double sc = std::sin(chi), cc = std::cos(chi);
  return {c * (P * cc - Q * sc), c * (P * sc + Q * cc)};
}

}  // namespace detail

inline double bessel_j0(double x) {
  x = std::fabs(x);
  if (x <= detail::bessel_crossover) return static_cast<double>(detail::j0_series_ld(x));
  return detail::jy_asymptotic(0, x).j;
}

inline double bessel_j1(double x) {
  double ax = std::fabs(x), s = x < 0 ? -1.0 : 1.0;
  if (ax <= detail::bessel_crossover) return s * static_cast<double>(detail::j1_series_ld(ax));
  return s * detail::jy_asymptotic(1, ax).j;
}

inline double bessel_y0(double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_y0: x must be > 0");
  if (x <= detail::bessel_crossover) {
    long double j0 = detail::j0_series_ld(x);
    long double s0 = detail::s0_series_ld(x);
    return static_cast<double>((2.0L / pi) * ((std::log(x / 2.0) + euler_gamma) * j0 + s0));
  }
  return detail::jy_asymptotic(0, x).y;
}

inline double bessel_y1(double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_y1: x must be > 0");
  if (x <= detail::bessel_crossover) {
    long double j1 = detail::j1_series_ld(x);
    long double s1 = detail::s1_series_ld(x);
    return static_cast<double>((2.0L / pi) * (std::log(x / 2.0) + euler_gamma) * j1 -
                               2.0L / (pi * static_cast<long double>(x)) -
                               (x / (2.0L * pi)) * s1);
  }
  return detail::jy_asymptotic(1, x).y;
}

// First-kind Hankel functions H^{(1)}_0, H^{(1)}_1.
inline cplx hankel0(double x) { return {bessel_j0(x), bessel_y0(x)}; }
inline cplx hankel1(double x) { return {bessel_j1(x), bessel_y1(x)}; }

// G(z) -> C_limit as z -> 0.
inline cplx kernel_G(double z) {
  if (z < 0.0) throw std::domain_error("kernel_G: z must be >= 0");
  if (z <= detail::bessel_crossover) {
    double j0 = static_cast<double>(detail::j0_series_ld(z));
    double s0 = static_cast<double>(detail::s0_series_ld(z));
    return C_limit * j0 - cplx{s0 / (2.0 * pi), 0.0};
  }
  auto jy = detail::jy_asymptotic(0, z);
  return cplx{0.0, 0.25} * cplx{jy.j, jy.y} + cplx{jy.j * std::log(z) / (2.0 * pi), 0.0};
}

// G1(z) -> 0 as z -> 0.
inline cplx kernel_G1(double z) {
  if (z < 0.0) throw std::domain_error("kernel_G1: z must be >= 0");
  if (z <= detail::bessel_crossover) {
    double j1 = static_cast<double>(detail::j1_series_ld(z));
    double s1 = static_cast<double>(detail::s1_series_ld(z));
    return C_limit * j1 + cplx{z * s1 / (8.0 * pi), 0.0};
  }
  auto jy = detail::jy_asymptotic(1, z);
  return cplx{0.0, 0.25} * cplx{jy.j, jy.y} +
         cplx{jy.j * std::log(z) / (2.0 * pi) - 1.0 / (2.0 * pi * z), 0.0};
}

}  // namespace arcscat
