/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Multilinear interpolation on cell-centered and staggered fields
 *
 ******************************************************************************/

#pragma once

#include <cmath>

#include "mlsplash/sim/mac_grid.hpp"

namespace mlsplash {

#ifndef NDEBUG
namespace debug {
//! number of interpolation requests that had to be clamped to the sample range
inline thread_local std::size_t clamp_events = 0;
}  // namespace debug
#endif

//! multilinear sample of a scalar array at a fractional sample-space position;
//! out-of-range positions are clamped to the valid sample lattice
template <int D>
inline double interpArray(const GridArray<D, double>& a, Vec<D> gp) {
  VecI<D> base;
  Vec<D> frac;
  for (int ax = 0; ax < D; ++ax) {
    const int n = a.size(ax);
#ifndef NDEBUG
    if (gp[ax] < 0.0 || gp[ax] > n - 1) ++debug::clamp_events;
#endif
    if (n == 1) {
      base[ax] = 0;
      frac[ax] = 0.0;
      continue;
    }
    double x = std::clamp(gp[ax], 0.0, static_cast<double>(n - 1));
    int b = static_cast<int>(std::floor(x));
    if (b > n - 2) b = n - 2;
    base[ax] = b;
    frac[ax] = x - b;
  }
  double sum = 0.0;
  for (int corner = 0; corner < (1 << D); ++corner) {
    double w = 1.0;
    VecI<D> c = base;
    for (int ax = 0; ax < D; ++ax) {
      if (corner & (1 << ax)) {
        w *= frac[ax];
        c[ax] += 1;
      } else {
        w *= 1.0 - frac[ax];
      }
    }
    if (w != 0.0) sum += w * a.at(c);
  }
  return sum;
}

//! cell-centered field (phi, pressure, curvature) at a world position
template <int D>
inline double interpCellField(const GridArray<D, double>& f, double h, const Vec<D>& pos) {
  Vec<D> gp;
  for (int a = 0; a < D; ++a) gp[a] = pos[a] / h - 0.5;
  return interpArray(f, gp);
}

template <int D>
inline double interpPhi(const MacGrid<D>& g, const Vec<D>& pos) {
  return interpCellField(g.phi, g.h, pos);
}

//! one velocity component from its own staggered lattice
template <int D>
inline double interpVelocityComponent(const MacGrid<D>& g, int axis, const Vec<D>& pos) {
  Vec<D> gp;
  for (int a = 0; a < D; ++a) gp[a] = pos[a] / g.h - (a == axis ? 0.0 : 0.5);
  return interpArray(g.u[axis], gp);
}

template <int D>
inline Vec<D> interpVelocity(const MacGrid<D>& g, const Vec<D>& pos) {
  Vec<D> v;
  for (int a = 0; a < D; ++a) v[a] = interpVelocityComponent(g, a, pos);
  return v;
}

//! gradient of a cell-centered field by symmetric differencing of interpolated
//! values, step h/2
template <int D>
inline Vec<D> interpCellGradient(const GridArray<D, double>& f, double h, const Vec<D>& pos) {
  Vec<D> grad;
  const double step = 0.5 * h;
  for (int a = 0; a < D; ++a) {
    Vec<D> lo = pos, hi = pos;
    lo[a] -= step;
    hi[a] += step;
    grad[a] = (interpCellField(f, h, hi) - interpCellField(f, h, lo)) / (2.0 * step);
  }
  return grad;
}

}  // namespace mlsplash
