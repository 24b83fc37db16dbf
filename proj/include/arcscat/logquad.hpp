#pragma once

// Quadrature weights for the periodic logarithmic factor ln(4 sin^2((t-s)/2))
// on the shifted 2n-point grid tau_j = (2j-1)pi/(2n), j = 1..2n:
//
//   R_j(t) = -(2pi/n) sum_{m=1}^{n-1} cos(m(t-tau_j))/m - (pi/n^2) cos(n(t-tau_j))
//
// Exact for trigonometric polynomials up to degree n-1:
//   sum_j R_j(t) = 0,  sum_j R_j(t) cos(m tau_j) = -(2pi/m) cos(mt), 1<=m<=n-1.

#include <vector>

#include "core.hpp"

namespace arcscat {

inline double log_weight_at(int n, double dt) {
  double s = 0.0;
  for (int m = 1; m < n; ++m) s += std::cos(m * dt) / m;
  return -(2.0 * pi / n) * s - (pi / (n * static_cast<double>(n))) * std::cos(n * dt);
}

// R_j(t) for j = 1..2n at arbitrary collocation parameter t.
inline std::vector<double> log_weights(int n, double t) {
  std::vector<double> R(2 * n);
  for (int j = 0; j < 2 * n; ++j) {
    double tau = (2.0 * j + 1.0) * pi / (2.0 * n);
    R[j] = log_weight_at(n, t - tau);
  }
  return R;
}

// Lattice table Rlat[l] = R at offset t - tau = l*pi/n, l = 0..2n-1.
// On the node grid, R_j(t_i) = Rlat[(i-j) mod 2n] and the mirrored weight
// R_j(2pi - t_i) = Rlat[(i+j+1) mod 2n] (0-based i, j).
inline std::vector<double> log_weight_table(int n) {
  std::vector<double> R(2 * n);
  for (int l = 0; l < 2 * n; ++l) R[l] = log_weight_at(n, l * pi / n);
  return R;
}

}  // namespace arcscat
