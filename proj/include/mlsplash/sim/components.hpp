/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Connected components of fluid cells under face adjacency
 *
 ******************************************************************************/

#pragma once

#include <vector>

#include "mlsplash/sim/mac_grid.hpp"
#include "mlsplash/sim/particles.hpp"

namespace mlsplash {

template <int D>
struct ComponentLabels {
  GridArray<D, int> label;            // -1 for non-fluid cells, else dense id from 0
  std::vector<std::size_t> sizes;     // cell count per component

  int count() const { return static_cast<int>(sizes.size()); }
};

//! flood fill over face-adjacent fluid cells; ids are assigned in scan order,
//! so the labeling is independent of any caller-side ordering
template <int D>
inline ComponentLabels<D> labelComponents(const GridArray<D, CellFlag>& flags) {
  ComponentLabels<D> out;
  out.label = GridArray<D, int>(flags.size(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < flags.total(); ++seed) {
    if (flags[seed] != CellFlag::Fluid || out.label[seed] != -1) continue;
    const int comp = out.count();
    std::size_t cells = 0;
    out.label[seed] = comp;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      ++cells;
      const VecI<D> c = flags.unflatten(idx);
      for (int a = 0; a < D; ++a) {
        for (int s = -1; s <= 1; s += 2) {
          VecI<D> nb = c;
          nb[a] += s;
          if (!flags.inBounds(nb)) continue;
          const std::size_t nidx = flags.flatten(nb);
          if (flags[nidx] == CellFlag::Fluid && out.label[nidx] == -1) {
            out.label[nidx] = comp;
            stack.push_back(nidx);
          }
        }
      }
    }
    out.sizes.push_back(cells);
  }
  return out;
}

//! cell flags marking every cell that contains at least one particle passing
//! the role filter; used for component analysis at a chosen resolution
template <int D, class KeepFn>
inline GridArray<D, CellFlag> particleCellFlags(const ParticleSet<D>& parts, VecI<D> res,
                                                double h, KeepFn&& keep) {
  GridArray<D, CellFlag> flags(res, CellFlag::Empty);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!keep(parts.role[i])) continue;
    VecI<D> c;
    bool ok = true;
    for (int a = 0; a < D; ++a) {
      c[a] = static_cast<int>(std::floor(parts.pos[i][a] / h));
      if (c[a] < 0 || c[a] >= res[a]) ok = false;
    }
    if (ok) flags.at(c) = CellFlag::Fluid;
  }
  return flags;
}

}  // namespace mlsplash
