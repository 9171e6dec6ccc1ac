/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Scene templates with randomized initial conditions
 *
 ******************************************************************************/

#pragma once

#include <optional>
#include <stdexcept>

#include "mlsplash/core/rng.hpp"
#include "mlsplash/sim/flip.hpp"

namespace mlsplash {

enum class SceneKind { DropletRain, BreakingDam, LiquidString, Pool };

//! randomized-condition ranges; which fields apply depends on the scene kind
template <int D>
struct SceneRand {
  int droplet_count_min = 3, droplet_count_max = 6;
  double droplet_radius = 0.02;        // meters
  Vec<D> position_min, position_max;   // droplet center box
  Vec<D> velocity_min, velocity_max;   // droplet initial velocity box
  double string_length_min = 0.2, string_length_max = 0.5;
  double string_thickness = 0.01;
  double pool_depth = 0.05;            // used by DropletRain and Pool
  double dam_width = 0.2, dam_height = 0.4;  // fractions of the domain
};

template <int D>
struct SceneConfig {
  SceneKind kind = SceneKind::Pool;
  VecI<D> res;
  double h = 0.01;
  SimParams<D> params;
  double flip_blend = 0.97;
  double jitter = 0.2;                 // stratified seeding perturbation
  SceneRand<D> rand;
  std::uint64_t seed = 1;
  double duration = 1.0;               // seconds
  int coarse_factor = 4;

  SceneConfig() { res.v.fill(64); }
};

namespace detail {

//! distance from a point to an axis-aligned capsule (segment along x)
template <int D>
inline double capsuleDistance(const Vec<D>& p, const Vec<D>& center, double length,
                              double thickness) {
  const double half = std::max(0.0, 0.5 * (length - thickness));
  Vec<D> q = center;
  q[0] = center[0] + std::clamp(p[0] - center[0], -half, half);
  return norm(p - q) - 0.5 * thickness;
}

}  // namespace detail

//! build the initial solver state for a template; a deterministic function of
//! (template, seed)
template <int D>
inline SolverState<D> randomizeScene(const SceneConfig<D>& cfg, std::uint64_t seed) {
  for (int a = 0; a < D; ++a)
    if (cfg.coarse_factor < 1 || cfg.res[a] % cfg.coarse_factor != 0)
      throw std::invalid_argument("scene: coarse_factor must divide the resolution");
  if (cfg.params.rho <= 0 || cfg.params.cfl <= 0 || cfg.params.cfl > 1 ||
      cfg.params.frame_dt <= 0)
    throw std::invalid_argument("scene: invalid physical parameters");

  SolverState<D> s(cfg.res, cfg.h, cfg.params);
  s.flip_blend = cfg.flip_blend;
  Rng rng(Rng::mix(seed, 1));
  const double h = cfg.h;
  const Vec<D> dom = s.grid.domainSize();

  struct Sphere {
    Vec<D> c;
    Vec<D> v;
  };
  std::vector<Sphere> spheres;
  double pool_top = -1.0;
  double string_len = 0.0;
  Vec<D> string_center;
  Vec<D> dam_hi;

  switch (cfg.kind) {
    case SceneKind::Pool:
      pool_top = h + cfg.rand.pool_depth;
      break;
    case SceneKind::DropletRain: {
      pool_top = h + cfg.rand.pool_depth;
      const int n = static_cast<int>(
          rng.uniformInt(cfg.rand.droplet_count_min, cfg.rand.droplet_count_max));
      for (int k = 0; k < n; ++k) {
        Vec<D> c;
        bool placed = false;
        for (int tries = 0; tries < 100; ++tries) {
          c = rng.uniformVec(cfg.rand.position_min, cfg.rand.position_max);
          if (interpCellField(s.solid_phi, h, c) > cfg.rand.droplet_radius) {
            placed = true;
            break;
          }
        }
        if (!placed) throw std::runtime_error("scene: droplet placement kept hitting solids");
        spheres.push_back({c, rng.uniformVec(cfg.rand.velocity_min, cfg.rand.velocity_max)});
      }
      break;
    }
    case SceneKind::BreakingDam:
      dam_hi = Vec<D>(0.0);
      dam_hi[0] = h + cfg.rand.dam_width * (dom[0] - 2 * h);
      dam_hi[1] = h + cfg.rand.dam_height * (dom[1] - 2 * h);
      if constexpr (D == 3) dam_hi[2] = dom[2] - h;
      break;
    case SceneKind::LiquidString:
      string_len = rng.uniform(cfg.rand.string_length_min, cfg.rand.string_length_max);
      string_center = 0.5 * dom;
      break;
  }

  seedParticles(
      s, rng,
      [&](const Vec<D>& p) -> std::optional<Vec<D>> {
        if (pool_top > 0.0 && p[1] < pool_top) return Vec<D>{};
        for (const Sphere& sp : spheres)
          if (norm(p - sp.c) < cfg.rand.droplet_radius) return sp.v;
        if (cfg.kind == SceneKind::BreakingDam) {
          bool in = true;
          for (int a = 0; a < D; ++a) in = in && p[a] > h && p[a] < dam_hi[a];
          if (in) return Vec<D>{};
        }
        if (cfg.kind == SceneKind::LiquidString &&
            detail::capsuleDistance(p, string_center, string_len, cfg.rand.string_thickness) <=
                0.0)
          return Vec<D>{};
        return std::nullopt;
      },
      cfg.jitter);

  updatePhiAndFlags(s);
  return s;
}

}  // namespace mlsplash
