#pragma once

// Direct sampling initializer: phase-correlate far-field data with plane-wave
// factors on a rectangular grid, then summarize the bright components as flat
// horizontal segments usable as Newton starting guesses.

#include <cstdlib>
#include <queue>
#include <vector>

#include "forward.hpp"

namespace arcscat {

struct IndicatorGrid {
  double x0 = 0.0, y0 = 0.0;  // lower-left grid point
  double spacing = 0.0;
  int nx = 0, ny = 0;
  std::vector<double> values;  // row-major: values[iy * nx + ix] >= 0
  double k = 0.0;
  Vec2 d;

  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }
  double x_of(int ix) const { return x0 + spacing * ix; }
  double y_of(int iy) const { return y0 + spacing * iy; }
};

inline IndicatorGrid dsm_indicator(const FarFieldSet& ff, double xmin, double xmax, double ymin,
                                   double ymax, double spacing) {
  if (ff.values.empty()) throw std::invalid_argument("indicator needs at least one direction");
  IndicatorGrid g;
  g.x0 = xmin;
  g.y0 = ymin;
  g.spacing = spacing;
  g.nx = static_cast<int>(std::floor((xmax - xmin) / spacing + 0.5)) + 1;
  g.ny = static_cast<int>(std::floor((ymax - ymin) / spacing + 0.5)) + 1;
  g.k = ff.k;
  g.d = ff.d;
  g.values.resize(static_cast<std::size_t>(g.nx) * g.ny);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      Vec2 z{g.x_of(ix), g.y_of(iy)};
      cplx acc = 0.0;
      for (std::size_t j = 0; j < ff.values.size(); ++j)
        acc += ff.values[j] * std::exp(cplx{0.0, ff.k * ff.dirs[j].dot(z)});
      g.values[static_cast<std::size_t>(iy) * g.nx + ix] = std::abs(acc);
    }
  return g;
}

struct GridMax {
  int ix = 0, iy = 0;
  double value = 0.0;
  double x = 0.0, y = 0.0;
};

inline GridMax indicator_max(const IndicatorGrid& g) {
  GridMax m;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      if (g.at(ix, iy) > m.value) m = {ix, iy, g.at(ix, iy), g.x_of(ix), g.y_of(iy)};
  return m;
}

struct ExtractionResult {
  std::vector<ChebCrack> cracks;
  bool shortage = false;  // fewer bright components than requested
  int components_found = 0;
};

// Threshold at 70% of the peak, find 8-connected components, keep the largest
// n_cracks, and summarize each as a horizontal segment: the x-extent of the
// component sets d0 +- d1 and the centroid height sets the single vertical
// coefficient.
inline ExtractionResult extract_initial_cracks(const IndicatorGrid& g, int n_cracks) {
  if (n_cracks < 1) throw std::invalid_argument("n_cracks must be >= 1");
  double peak = 0.0;
  for (double v : g.values) peak = std::max(peak, v);
  double thr = 0.7 * peak;

  std::vector<int> label(g.values.size(), -1);
  struct Comp {
    int size = 0;
    double sx = 0.0, sy = 0.0;
    double xmin = 0.0, xmax = 0.0;
    int first_cell = 0;
  };
  std::vector<Comp> comps;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      std::size_t idx = static_cast<std::size_t>(iy) * g.nx + ix;
      if (label[idx] >= 0 || !(g.values[idx] >= thr) || peak == 0.0) continue;
      int id = static_cast<int>(comps.size());
      Comp c;
      c.xmin = c.xmax = g.x_of(ix);
      c.first_cell = static_cast<int>(idx);
      std::queue<std::pair<int, int>> q;
      q.push({ix, iy});
      label[idx] = id;
      while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop();
        c.size += 1;
        c.sx += g.x_of(cx);
        c.sy += g.y_of(cy);
        c.xmin = std::min(c.xmin, g.x_of(cx));
        c.xmax = std::max(c.xmax, g.x_of(cx));
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            int nxp = cx + dx, nyp = cy + dy;
            if (nxp < 0 || nxp >= g.nx || nyp < 0 || nyp >= g.ny) continue;
            std::size_t nidx = static_cast<std::size_t>(nyp) * g.nx + nxp;
            if (label[nidx] >= 0 || !(g.values[nidx] >= thr)) continue;
            label[nidx] = id;
            q.push({nxp, nyp});
          }
      }
      comps.push_back(c);
    }

  ExtractionResult out;
  out.components_found = static_cast<int>(comps.size());
  out.shortage = out.components_found < n_cracks;

  std::vector<int> order(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (comps[a].size != comps[b].size) return comps[a].size > comps[b].size;
    return comps[a].first_cell < comps[b].first_cell;
  });
  int keep = std::min<int>(n_cracks, static_cast<int>(order.size()));
  order.resize(keep);
  // Deterministic emission order: bottom-to-top, then left-to-right.
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ya = comps[a].sy / comps[a].size, yb = comps[b].sy / comps[b].size;
    if (ya != yb) return ya < yb;
    return comps[a].sx / comps[a].size < comps[b].sx / comps[b].size;
  });
  for (int id : order) {
    const Comp& c = comps[id];
    ChebCrack cr;
    cr.d0 = 0.5 * (c.xmin + c.xmax);
    cr.d1 = std::max(0.5 * (c.xmax - c.xmin), g.spacing);  // a one-cell blob still has width
    cr.c = {c.sy / c.size};
    out.cracks.push_back(cr);
  }
  return out;
}

}  // namespace arcscat
