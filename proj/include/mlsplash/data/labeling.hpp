/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Splash labeling: particles that end a frame window inside a freshly
 * detached sub-threshold component, and the Delta-v regression target
 *
 ******************************************************************************/

#pragma once

#include <unordered_map>
#include <vector>

#include "mlsplash/sim/components.hpp"

namespace mlsplash {

//! droplet volume threshold in coarse cells: components strictly smaller
//! count as droplets. 8 cells in 3D; the 2D analogue is 4.
inline int defaultDropletMaxCells(int dim) { return dim == 3 ? 8 : 4; }

//! per-particle splash labels for one frame window. Components are taken on
//! the coarse grid from particle-occupied cells; a particle is a splash when
//! its end-of-window component is sub-threshold and shares no particle with
//! any sub-threshold component of the start state.
template <int D>
inline std::vector<std::uint8_t> labelFramePair(const ParticleSet<D>& at_t,
                                                const ParticleSet<D>& at_t1, VecI<D> fine_res,
                                                double fine_h, int coarse_factor,
                                                int droplet_max_cells) {
  if (at_t.size() != at_t1.size())
    throw std::invalid_argument("labelFramePair: particle sets differ in size");
  for (std::size_t i = 0; i < at_t.size(); ++i)
    if (at_t.id[i] != at_t1.id[i])
      throw std::invalid_argument("labelFramePair: particle ids do not match");

  VecI<D> cres;
  for (int a = 0; a < D; ++a) {
    if (fine_res[a] % coarse_factor != 0)
      throw std::invalid_argument("labelFramePair: resolution not divisible by factor");
    cres[a] = fine_res[a] / coarse_factor;
  }
  const double ch = fine_h * coarse_factor;
  auto keep = [](Role r) { return r == Role::Bulk; };

  const auto flags_t = particleCellFlags(at_t, cres, ch, keep);
  const auto flags_t1 = particleCellFlags(at_t1, cres, ch, keep);
  const auto comps_t = labelComponents(flags_t);
  const auto comps_t1 = labelComponents(flags_t1);

  auto compOf = [&](const ComponentLabels<D>& comps, const ParticleSet<D>& parts,
                    std::size_t i) -> int {
    VecI<D> c;
    for (int a = 0; a < D; ++a) {
      c[a] = static_cast<int>(std::floor(parts.pos[i][a] / ch));
      if (c[a] < 0 || c[a] >= cres[a]) return -1;
    }
    return comps.label.at(c);
  };

  // particles that were part of a sub-threshold component at the window start
  std::vector<std::uint8_t> in_small_at_t(at_t.size(), 0);
  for (std::size_t i = 0; i < at_t.size(); ++i) {
    if (at_t.role[i] != Role::Bulk) continue;
    const int c = compOf(comps_t, at_t, i);
    if (c >= 0 && comps_t.sizes[static_cast<std::size_t>(c)] <
                      static_cast<std::size_t>(droplet_max_cells))
      in_small_at_t[i] = 1;
  }

  // a sub-threshold end component is new iff none of its members came from a
  // sub-threshold start component
  std::unordered_map<int, bool> comp_new;
  for (std::size_t i = 0; i < at_t1.size(); ++i) {
    if (at_t1.role[i] != Role::Bulk) continue;
    const int c = compOf(comps_t1, at_t1, i);
    if (c < 0 ||
        comps_t1.sizes[static_cast<std::size_t>(c)] >= static_cast<std::size_t>(droplet_max_cells))
      continue;
    auto [it, inserted] = comp_new.try_emplace(c, true);
    if (in_small_at_t[i]) it->second = false;
  }

  std::vector<std::uint8_t> labels(at_t.size(), 0);
  for (std::size_t i = 0; i < at_t1.size(); ++i) {
    if (at_t1.role[i] != Role::Bulk) continue;
    const int c = compOf(comps_t1, at_t1, i);
    if (c < 0) continue;
    auto it = comp_new.find(c);
    if (it != comp_new.end() && it->second) labels[i] = 1;
  }
  return labels;
}

//! Delta-v target: observed fine-scale mean velocity over the window minus
//! the coarse-grid velocity at the window end
template <int D>
inline Vec<D> computeDv(const Vec<D>& p_t, const Vec<D>& p_t1, const Vec<D>& v_coarse_t1,
                        double dt) {
  if (dt <= 0.0) throw std::invalid_argument("computeDv: dt must be positive");
  return (p_t1 - p_t) / dt - v_coarse_t1;
}

}  // namespace mlsplash
