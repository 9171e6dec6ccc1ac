/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Static solid distance field and particle push-out
 *
 ******************************************************************************/

#pragma once

#include "mlsplash/sim/interpolate.hpp"
#include "mlsplash/sim/level_set.hpp"

namespace mlsplash {

//! signed distance to the solid region (negative inside solids); solids are
//! static per scene so this is computed once
template <int D>
inline GridArray<D, double> computeSolidPhi(const GridArray<D, CellFlag>& flags, double h) {
  GridArray<D, double> sphi(flags.size());
  for (std::size_t i = 0; i < flags.total(); ++i)
    sphi[i] = flags[i] == CellFlag::Solid ? -0.5 * h : 0.5 * h;
  redistance(sphi, h);
  return sphi;
}

//! move a particle out of solid cells and remove its incoming normal velocity
template <int D>
inline void pushOutOfSolid(const GridArray<D, double>& solid_phi, double h, Vec<D>& pos,
                           Vec<D>& vel) {
  const double margin = 1e-2 * h;
  const double sd = interpCellField(solid_phi, h, pos);
  if (sd >= margin) return;
  Vec<D> n = interpCellGradient(solid_phi, h, pos);
  const double len = norm(n);
  if (len < 1e-12) return;
  n = n / len;
  pos += (margin - sd) * n;
  const double vn = dot(vel, n);
  if (vn < 0.0) vel -= vn * n;
}

//! keep positions strictly inside the simulation box
template <int D>
inline void clampToDomain(const MacGrid<D>& g, Vec<D>& pos) {
  for (int a = 0; a < D; ++a) {
    const double lo = 1e-6 * g.h;
    const double hi = g.res[a] * g.h - 1e-6 * g.h;
    pos[a] = std::clamp(pos[a], lo, hi);
  }
}

}  // namespace mlsplash
