/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Droplet counting for the quantitative breakup experiments
 *
 ******************************************************************************/

#pragma once

#include <set>

#include "mlsplash/data/labeling.hpp"
#include "mlsplash/sim/level_set.hpp"

namespace mlsplash {

//! count droplets at a chosen grid resolution: sub-threshold connected
//! components of the liquid built from bulk and splash particles, excluding
//! the main body (the largest component); every in-flight splash particle
//! counts as one droplet of its own
template <int D>
inline int countDroplets(const ParticleSet<D>& parts, VecI<D> count_res, double count_h,
                         int droplet_max_cells) {
  auto keep = [](Role r) { return r == Role::Bulk || r == Role::Splash; };
  const auto phi =
      buildLevelSet(parts, count_res, count_h, particleRadius(count_h, D), keep);
  GridArray<D, CellFlag> flags(count_res, CellFlag::Empty);
  for (std::size_t i = 0; i < phi.total(); ++i)
    if (phi[i] < 0.0) flags[i] = CellFlag::Fluid;
  const auto comps = labelComponents(flags);

  int n_splash = 0;
  std::set<int> splash_comps;  // components already represented by a splash
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts.role[i] != Role::Splash) continue;
    ++n_splash;
    VecI<D> c;
    bool ok = true;
    for (int a = 0; a < D; ++a) {
      c[a] = static_cast<int>(std::floor(parts.pos[i][a] / count_h));
      if (c[a] < 0 || c[a] >= count_res[a]) ok = false;
    }
    if (ok && comps.label.at(c) >= 0) splash_comps.insert(comps.label.at(c));
  }

  // the main body is never a droplet
  int largest = -1;
  std::size_t largest_size = 0;
  for (int c = 0; c < comps.count(); ++c) {
    if (comps.sizes[static_cast<std::size_t>(c)] > largest_size) {
      largest_size = comps.sizes[static_cast<std::size_t>(c)];
      largest = c;
    }
  }

  int count = n_splash;
  for (int c = 0; c < comps.count(); ++c) {
    if (c == largest) continue;
    if (comps.sizes[static_cast<std::size_t>(c)] >= static_cast<std::size_t>(droplet_max_cells))
      continue;
    if (splash_comps.contains(c)) continue;  // already counted as in-flight
    ++count;
  }
  return count;
}

}  // namespace mlsplash
