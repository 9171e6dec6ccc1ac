/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Interface curvature kappa = div(grad phi / |grad phi|) from central
 * differences of the level set
 *
 ******************************************************************************/

#pragma once

#include <cmath>

#include "mlsplash/sim/interpolate.hpp"

namespace mlsplash {

//! curvature at a cell center, clamped to the resolvable 1/h; in 3D this is
//! the sum of the principal curvatures (2/r on a sphere)
template <int D>
inline double curvatureAtCell(const GridArray<D, double>& phi, double h, const VecI<D>& c) {
  double d1[D];   // first derivatives
  double d2[D];   // second derivatives
  for (int a = 0; a < D; ++a) {
    const double lo = phi.atClamped(c - axisOffset<D>(a));
    const double hi = phi.atClamped(c + axisOffset<D>(a));
    const double mid = phi.at(c);
    d1[a] = (hi - lo) / (2.0 * h);
    d2[a] = (hi - 2.0 * mid + lo) / (h * h);
  }
  double g2 = 0.0;
  for (int a = 0; a < D; ++a) g2 += d1[a] * d1[a];
  const double gnorm = std::sqrt(g2);
  if (gnorm < 1e-8) return 0.0;

  double num = 0.0;
  for (int a = 0; a < D; ++a) num += d2[a] * (g2 - d1[a] * d1[a]);
  for (int a = 0; a < D; ++a) {
    for (int b = a + 1; b < D; ++b) {
      const double pp = phi.atClamped(c + axisOffset<D>(a) + axisOffset<D>(b));
      const double pm = phi.atClamped(c + axisOffset<D>(a) - axisOffset<D>(b));
      const double mp = phi.atClamped(c - axisOffset<D>(a) + axisOffset<D>(b));
      const double mm = phi.atClamped(c - axisOffset<D>(a) - axisOffset<D>(b));
      const double dab = (pp - pm - mp + mm) / (4.0 * h * h);
      num -= 2.0 * d1[a] * d1[b] * dab;
    }
  }
  const double kappa = num / (g2 * gnorm);
  return std::clamp(kappa, -1.0 / h, 1.0 / h);
}

//! curvature interpolated to a world position near the interface
template <int D>
inline double computeCurvature(const GridArray<D, double>& phi, double h, const Vec<D>& pos) {
  // blend the per-cell curvatures of the surrounding cell centers
  VecI<D> base;
  Vec<D> frac;
  for (int a = 0; a < D; ++a) {
    double x = pos[a] / h - 0.5;
    x = std::clamp(x, 0.0, static_cast<double>(phi.size(a) - 1));
    int b = static_cast<int>(std::floor(x));
    if (b > phi.size(a) - 2) b = std::max(0, phi.size(a) - 2);
    base[a] = b;
    frac[a] = x - b;
  }
  double sum = 0.0;
  for (int corner = 0; corner < (1 << D); ++corner) {
    double w = 1.0;
    VecI<D> c = base;
    for (int a = 0; a < D; ++a) {
      if (corner & (1 << a)) {
        w *= frac[a];
        if (c[a] + 1 < phi.size(a)) c[a] += 1;
      } else {
        w *= 1.0 - frac[a];
      }
    }
    if (w != 0.0) sum += w * curvatureAtCell(phi, h, c);
  }
  return sum;
}

//! curvature evaluated on every cell within the given band of the interface
template <int D>
inline GridArray<D, double> curvatureGrid(const GridArray<D, double>& phi, double h,
                                          double band_cells = 3.0) {
  GridArray<D, double> kappa(phi.size(), 0.0);
  const double band = band_cells * h;
  for (std::size_t i = 0; i < phi.total(); ++i) {
    if (std::abs(phi[i]) > band) continue;
    kappa[i] = curvatureAtCell(phi, h, phi.unflatten(i));
  }
  return kappa;
}

}  // namespace mlsplash
