#pragma once

// Shared benchmark configurations used across the test suite.
#include <arcscat/geometry.hpp>

namespace fixtures {

// Three disjoint arcs with mixed oscillation content, spread over [-1.5, 2] x [-1.5, 3.5].
inline arcscat::CrackSet three_crack_truth() {
  using namespace arcscat;
  TrigCrack g1;  // (0.5 s + 1, 0.5 cos(pi s/2) + 0.2 sin(pi s/2) - 0.1 cos(3 pi s/2))
  g1.ax0 = 1.0;
  g1.ax1 = 0.5;
  g1.terms = {{false, 1, 0.5}, {true, 1, 0.2}, {false, 3, -0.1}};
  TrigCrack g2;  // (0.5 s - 1, -1 - 0.4 sin(pi s/2) + 0.1 cos(3 pi s/2))
  g2.ax0 = -1.0;
  g2.ax1 = 0.5;
  g2.terms = {{false, 0, -1.0}, {true, 1, -0.4}, {false, 3, 0.1}};
  TrigCrack g3;  // (s, 3 + 0.3 cos(pi s/2) + 0.2 sin(pi s/2))
  g3.ax0 = 0.0;
  g3.ax1 = 1.0;
  g3.terms = {{false, 0, 3.0}, {false, 1, 0.3}, {true, 1, 0.2}};
  CrackSet cs;
  cs.cracks = {Crack{g1}, Crack{g2}, Crack{g3}};
  return cs;
}

// Flat starting segments paired with the three cracks above.
inline std::vector<arcscat::Crack> three_crack_inits() {
  using namespace arcscat;
  return {Crack{ChebCrack{1.5, 0.5, {0.0}}},
          Crack{ChebCrack{-1.5, 0.5, {-1.0}}},
          Crack{ChebCrack{0.0, 1.0, {3.0}}}};
}

// Single strongly oscillating arc on x in [-1, 1].
inline arcscat::CrackSet wavy_crack_truth() {
  using namespace arcscat;
  TrigCrack g;  // (s, 0.5 cos(pi s) + 0.2 sin(pi s) - 0.1 cos(3 pi s) + 0.1 sin(5 pi s))
  g.ax0 = 0.0;
  g.ax1 = 1.0;
  g.terms = {{false, 2, 0.5}, {true, 2, 0.2}, {false, 6, -0.1}, {true, 10, 0.1}};
  CrackSet cs;
  cs.cracks = {Crack{g}};
  return cs;
}

inline std::vector<arcscat::Crack> wavy_crack_init() {
  return {arcscat::Crack{arcscat::ChebCrack{0.0, 1.0, {0.0}}}};
}

}  // namespace fixtures
