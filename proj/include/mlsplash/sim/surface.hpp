/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Surface-particle selection: the one-cell narrow band around air
 *
 ******************************************************************************/

#pragma once

#include <vector>

#include "mlsplash/sim/mac_grid.hpp"
#include "mlsplash/sim/particles.hpp"

namespace mlsplash {

//! cells that are Empty or face-adjacent to an Empty cell (one dilation pass)
template <int D>
inline GridArray<D, std::uint8_t> nearAirMask(const GridArray<D, CellFlag>& flags) {
  GridArray<D, std::uint8_t> mask(flags.size(), 0);
  for (std::size_t i = 0; i < flags.total(); ++i) {
    if (flags[i] == CellFlag::Empty) {
      mask[i] = 1;
      continue;
    }
    const VecI<D> c = flags.unflatten(i);
    for (int a = 0; a < D && !mask[i]; ++a) {
      for (int s = -1; s <= 1; s += 2) {
        VecI<D> nb = c;
        nb[a] += s;
        if (flags.inBounds(nb) && flags.at(nb) == CellFlag::Empty) {
          mask[i] = 1;
          break;
        }
      }
    }
  }
  return mask;
}

//! indices of bulk particles inside the near-air band
template <int D>
inline std::vector<std::size_t> detectSurfaceParticles(const ParticleSet<D>& parts,
                                                       const GridArray<D, CellFlag>& flags,
                                                       double h) {
  const GridArray<D, std::uint8_t> mask = nearAirMask(flags);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts.role[i] != Role::Bulk) continue;
    VecI<D> c;
    bool ok = true;
    for (int a = 0; a < D; ++a) {
      c[a] = static_cast<int>(std::floor(parts.pos[i][a] / h));
      if (c[a] < 0 || c[a] >= flags.size(a)) ok = false;
    }
    if (ok && mask.at(c)) out.push_back(i);
  }
  return out;
}

}  // namespace mlsplash
