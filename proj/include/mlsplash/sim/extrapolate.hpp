/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Layered extrapolation of face velocities into air
 *
 ******************************************************************************/

#pragma once

#include "mlsplash/sim/mac_grid.hpp"

namespace mlsplash {

template <int D>
struct FaceMask {
  std::array<GridArray<D, std::uint8_t>, D> m;
  GridArray<D, std::uint8_t>& operator[](int a) { return m[static_cast<std::size_t>(a)]; }
  const GridArray<D, std::uint8_t>& operator[](int a) const {
    return m[static_cast<std::size_t>(a)];
  }
};

//! faces adjacent to at least one fluid cell are valid after a projection
template <int D>
inline FaceMask<D> faceValidityFromFlags(const MacGrid<D>& g) {
  FaceMask<D> valid;
  for (int axis = 0; axis < D; ++axis) {
    valid[axis] = GridArray<D, std::uint8_t>(g.u[axis].size(), 0);
    for (std::size_t i = 0; i < valid[axis].total(); ++i) {
      const VecI<D> f = valid[axis].unflatten(i);
      // cells on both sides of the face (lo may be f-1 along the axis)
      VecI<D> hi = f, lo = f;
      lo[axis] -= 1;
      const bool hi_fluid = g.flags.inBounds(hi) && g.flags.at(hi) == CellFlag::Fluid;
      const bool lo_fluid = g.flags.inBounds(lo) && g.flags.at(lo) == CellFlag::Fluid;
      if (hi_fluid || lo_fluid) valid[axis][i] = 1;
    }
  }
  return valid;
}

//! breadth-first averaging: each pass assigns invalid faces the mean of their
//! already-valid lattice neighbors; deterministic regardless of traversal
template <int D>
inline void extrapolateVelocity(MacGrid<D>& g, FaceMask<D>& valid, int layers) {
  for (int pass = 0; pass < layers; ++pass) {
    bool changed = false;
    for (int axis = 0; axis < D; ++axis) {
      GridArray<D, std::uint8_t> next = valid[axis];
      GridArray<D, double> nextu = g.u[axis];
      for (std::size_t i = 0; i < valid[axis].total(); ++i) {
        if (valid[axis][i]) continue;
        const VecI<D> f = valid[axis].unflatten(i);
        double sum = 0.0;
        int cnt = 0;
        for (int a = 0; a < D; ++a) {
          for (int s = -1; s <= 1; s += 2) {
            VecI<D> nb = f;
            nb[a] += s;
            if (!valid[axis].inBounds(nb)) continue;
            if (valid[axis].at(nb)) {
              sum += g.u[axis].at(nb);
              ++cnt;
            }
          }
        }
        if (cnt > 0) {
          nextu[i] = sum / cnt;
          next[i] = 1;
          changed = true;
        }
      }
      valid[axis] = next;
      g.u[axis] = nextu;
    }
    if (!changed) break;
  }
}

//! zero the normal component on faces touching solid cells
template <int D>
inline void enforceSolidFaces(MacGrid<D>& g) {
  for (int axis = 0; axis < D; ++axis) {
    for (std::size_t i = 0; i < g.u[axis].total(); ++i) {
      const VecI<D> f = g.u[axis].unflatten(i);
      VecI<D> hi = f, lo = f;
      lo[axis] -= 1;
      const bool hi_solid = !g.flags.inBounds(hi) || g.flags.at(hi) == CellFlag::Solid;
      const bool lo_solid = !g.flags.inBounds(lo) || g.flags.at(lo) == CellFlag::Solid;
      if (hi_solid || lo_solid) g.u[axis][i] = 0.0;
    }
  }
}

}  // namespace mlsplash
