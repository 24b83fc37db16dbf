#pragma once

#include <vector>

namespace arcscat {

struct ChebVal {
  double v = 0.0, d = 0.0, dd = 0.0;  // value, d/ds, d2/ds2
};

// T_i(s) with first and second derivative, from the coupled recurrences
// T_{i+1} = 2s T_i - T_{i-1}, T'_{i+1} = 2T_i + 2s T'_i - T'_{i-1},
// T''_{i+1} = 4T'_i + 2s T''_i - T''_{i-1}; stable on [-1,1].
inline ChebVal cheb_T(int i, double s) {
  if (i == 0) return {1.0, 0.0, 0.0};
  double t0 = 1.0, d0 = 0.0, s0 = 0.0;
  double t1 = s, d1 = 1.0, s1 = 0.0;
  for (int m = 1; m < i; ++m) {
    double t2 = 2.0 * s * t1 - t0;
    double d2 = 2.0 * t1 + 2.0 * s * d1 - d0;
    double s2 = 4.0 * d1 + 2.0 * s * s1 - s0;
    t0 = t1; d0 = d1; s0 = s1;
    t1 = t2; d1 = d2; s1 = s2;
  }
  return {t1, d1, s1};
}

// sum_i c[i] T_i(s) with derivatives.
inline ChebVal cheb_series(const std::vector<double>& c, double s) {
  ChebVal out;
  if (c.empty()) return out;
  double t0 = 1.0, d0 = 0.0, s0 = 0.0;
  out.v = c[0];
  if (c.size() == 1) return out;
  double t1 = s, d1 = 1.0, s1 = 0.0;
  out.v += c[1] * t1;
  out.d += c[1] * d1;
  for (std::size_t i = 2; i < c.size(); ++i) {
    double t2 = 2.0 * s * t1 - t0;
    double d2 = 2.0 * t1 + 2.0 * s * d1 - d0;
    double s2 = 4.0 * d1 + 2.0 * s * s1 - s0;
    out.v += c[i] * t2;
    out.d += c[i] * d2;
    out.dd += c[i] * s2;
    t0 = t1; d0 = d1; s0 = s1;
    t1 = t2; d1 = d2; s1 = s2;
  }
  return out;
}

}  // namespace arcscat
