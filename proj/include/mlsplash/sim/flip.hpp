/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * FLIP time integrator: particle-grid transfers, forces, pressure projection,
 * advection, and the frame/substep loop
 *
 ******************************************************************************/

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "mlsplash/core/rng.hpp"
#include "mlsplash/sim/extrapolate.hpp"
#include "mlsplash/sim/level_set.hpp"
#include "mlsplash/sim/mac_grid.hpp"
#include "mlsplash/sim/particles.hpp"
#include "mlsplash/sim/pressure.hpp"
#include "mlsplash/sim/solid.hpp"

namespace mlsplash {

template <int D>
struct SolverState {
  MacGrid<D> grid;
  ParticleSet<D> particles;
  SimParams<D> params;
  double t = 0.0;
  double flip_blend = 0.97;           // PIC fraction is 1 - flip_blend
  GridArray<D, double> solid_phi;     // static; rebuild after editing solids
  double particle_radius = 0.0;       // level-set reconstruction radius

  SolverState() = default;
  SolverState(VecI<D> res, double h, SimParams<D> p) : grid(res, h), params(p) {
    grid.markSolidBoundary();
    particle_radius = particleRadius(h, D);
    refreshSolidPhi();
  }

  void refreshSolidPhi() { solid_phi = computeSolidPhi(grid.flags, grid.h); }
};

//! CFL-limited substep size, clamped to land exactly on the frame boundary.
//! With surface tension a capillary-wave limit applies as well.
template <int D>
inline double cflDt(const SolverState<D>& s, double remaining) {
  double vmax = 0.0;
  for (int a = 0; a < D; ++a)
    for (std::size_t i = 0; i < s.grid.u[a].total(); ++i)
      vmax = std::max(vmax, std::abs(s.grid.u[a][i]));
  for (std::size_t i = 0; i < s.particles.size(); ++i)
    if (s.particles.role[i] == Role::Bulk)
      for (int a = 0; a < D; ++a) vmax = std::max(vmax, std::abs(s.particles.vel[i][a]));
  double dt = s.params.cfl * s.grid.h / std::max(vmax, 1e-6);
  if (s.params.sigma > 0.0) {
    const double h = s.grid.h;
    const double cap = std::sqrt(s.params.rho * h * h * h /
                                 (2.0 * std::numbers::pi * s.params.sigma));
    dt = std::min(dt, s.params.cfl * cap);
  }
  if (dt >= remaining || remaining - dt <= 1e-12 * remaining) return remaining;
  return dt;
}

namespace detail {

//! scatter one particle value onto a staggered component array
template <int D>
inline void scatterFace(GridArray<D, double>& u, GridArray<D, double>& w, int axis, double h,
                        const Vec<D>& pos, double value) {
  VecI<D> base;
  Vec<D> frac;
  for (int a = 0; a < D; ++a) {
    const double gp = pos[a] / h - (a == axis ? 0.0 : 0.5);
    const double fl = std::floor(gp);
    base[a] = static_cast<int>(fl);
    frac[a] = gp - fl;
  }
  for (int corner = 0; corner < (1 << D); ++corner) {
    double wt = 1.0;
    VecI<D> c = base;
    for (int a = 0; a < D; ++a) {
      if (corner & (1 << a)) {
        wt *= frac[a];
        c[a] += 1;
      } else {
        wt *= 1.0 - frac[a];
      }
    }
    if (wt == 0.0 || !u.inBounds(c)) continue;
    u.at(c) += wt * value;
    w.at(c) += wt;
  }
}

}  // namespace detail

//! momentum-weighted multilinear particle-to-grid transfer of bulk particles;
//! returns per-face validity (faces that received any weight)
template <int D>
inline FaceMask<D> particlesToGrid(SolverState<D>& s) {
  FaceMask<D> valid;
  std::array<GridArray<D, double>, D> weight;
  for (int a = 0; a < D; ++a) {
    s.grid.u[a].fill(0.0);
    weight[a] = GridArray<D, double>(s.grid.u[a].size(), 0.0);
    valid[a] = GridArray<D, std::uint8_t>(s.grid.u[a].size(), 0);
  }
  for (std::size_t i = 0; i < s.particles.size(); ++i) {
    if (s.particles.role[i] != Role::Bulk) continue;
    for (int a = 0; a < D; ++a)
      detail::scatterFace(s.grid.u[a], weight[a], a, s.grid.h, s.particles.pos[i],
                          s.particles.vel[i][a]);
  }
  for (int a = 0; a < D; ++a) {
    for (std::size_t i = 0; i < weight[a].total(); ++i) {
      if (weight[a][i] > 0.0) {
        s.grid.u[a][i] /= weight[a][i];
        valid[a][i] = 1;
      } else {
        s.grid.u[a][i] = 0.0;
      }
    }
  }
  return valid;
}

template <int D>
inline void applyGravity(MacGrid<D>& g, const Vec<D>& gravity, double dt) {
  for (int a = 0; a < D; ++a) {
    if (gravity[a] == 0.0) continue;
    for (std::size_t i = 0; i < g.u[a].total(); ++i) g.u[a][i] += gravity[a] * dt;
  }
}

//! rebuild the particle level set and derive cell flags from its sign
template <int D>
inline void updatePhiAndFlags(SolverState<D>& s) {
  s.grid.phi = buildLevelSet(s.particles, s.grid.res, s.grid.h, s.particle_radius);
  setFlagsFromPhi(s.grid);
}

//! FLIP/PIC blended grid-to-particle velocity update
template <int D>
inline void gridToParticles(SolverState<D>& s, const MacGrid<D>& saved) {
  const double blend = s.flip_blend;
  for (std::size_t i = 0; i < s.particles.size(); ++i) {
    if (s.particles.role[i] != Role::Bulk) continue;
    const Vec<D> u_new = interpVelocity(s.grid, s.particles.pos[i]);
    const Vec<D> u_old = interpVelocity(saved, s.particles.pos[i]);
    s.particles.vel[i] =
        blend * (s.particles.vel[i] + u_new - u_old) + (1.0 - blend) * u_new;
  }
}

//! midpoint (RK2) advection of bulk particles through the grid field
template <int D>
inline void advectBulk(SolverState<D>& s, double dt) {
  for (std::size_t i = 0; i < s.particles.size(); ++i) {
    if (s.particles.role[i] != Role::Bulk) continue;
    Vec<D>& p = s.particles.pos[i];
    const Vec<D> mid = p + 0.5 * dt * interpVelocity(s.grid, p);
    p += dt * interpVelocity(s.grid, mid);
    clampToDomain(s.grid, p);
    pushOutOfSolid(s.solid_phi, s.grid.h, p, s.particles.vel[i]);
  }
}

//! ballistic advance of splash and secondary particles: gravity only,
//! symplectic Euler. Splashes rejoin the bulk where phi < 0; secondaries are
//! culled there instead.
template <int D>
inline void stepBallistic(SolverState<D>& s, double dt) {
  std::vector<std::uint8_t> cull;
  bool any_cull = false;
  for (std::size_t i = 0; i < s.particles.size(); ++i) {
    const Role r = s.particles.role[i];
    if (r == Role::Bulk) continue;
    Vec<D>& v = s.particles.vel[i];
    Vec<D>& p = s.particles.pos[i];
    v += s.params.gravity * dt;
    p += v * dt;
    clampToDomain(s.grid, p);
    pushOutOfSolid(s.solid_phi, s.grid.h, p, v);
    if (interpPhi(s.grid, p) < 0.0) {
      if (r == Role::Splash) {
        s.particles.role[i] = Role::Bulk;  // re-enters the transfer next substep
        s.particles.expectation[i] = 0.0;
        s.particles.window_elapsed[i] = 0.0;
      } else {
        if (cull.empty()) cull.assign(s.particles.size(), 0);
        cull[i] = 1;
        any_cull = true;
      }
    }
  }
  if (any_cull) s.particles.removeMarked(cull);
}

//! no-op inference hooks used by the plain FLIP loop
template <int D>
struct NullHooks {
  void afterProjection(SolverState<D>&, double, bool) {}
  void afterParticleUpdate(SolverState<D>&, double, bool) {}
};

//! one substep of the full pipeline; frame_end marks the substep that closes
//! the frame window
template <int D, class Hooks>
inline void advanceSubstep(SolverState<D>& s, double dt, bool frame_end, Hooks&& hooks) {
  FaceMask<D> transfer_valid = particlesToGrid(s);
  extrapolateVelocity(s.grid, transfer_valid, 2);
  const MacGrid<D> saved = s.grid;  // pre-force velocities for the FLIP delta
  applyGravity(s.grid, s.params.gravity, dt);
  updatePhiAndFlags(s);
  projectPressure(s.grid, s.params, dt);
  FaceMask<D> valid = faceValidityFromFlags(s.grid);
  extrapolateVelocity(s.grid, valid, 4);
  enforceSolidFaces(s.grid);
  hooks.afterProjection(s, dt, frame_end);
  gridToParticles(s, saved);
  hooks.afterParticleUpdate(s, dt, frame_end);
  advectBulk(s, dt);
  stepBallistic(s, dt);
  s.t += dt;
}

//! advance exactly one frame window; substeps always sum to frame_dt.
//! forced_substeps > 0 replaces the CFL policy with equal substeps.
template <int D, class Hooks>
inline int advanceFrame(SolverState<D>& s, Hooks&& hooks, int forced_substeps = 0) {
  const double frame_dt = s.params.frame_dt;
  double remaining = frame_dt;
  int steps = 0;
  while (remaining > 0.0) {
    double dt;
    if (forced_substeps > 0) {
      dt = frame_dt / forced_substeps;
      if (dt >= remaining || remaining - dt <= 1e-12 * frame_dt) dt = remaining;
    } else {
      dt = cflDt(s, remaining);
    }
    const bool frame_end = dt == remaining;
    advanceSubstep(s, dt, frame_end, hooks);
    remaining -= dt;
    ++steps;
    if (frame_end) break;
  }
  return steps;
}

template <int D>
inline int advanceFrame(SolverState<D>& s, int forced_substeps = 0) {
  NullHooks<D> hooks;
  return advanceFrame(s, hooks, forced_substeps);
}

//! per-axis subdivision for stratified seeding; particles_per_cell must be a
//! D-th power
template <int D>
inline int seedSubdivisions(int particles_per_cell) {
  const int s = static_cast<int>(std::lround(std::pow(particles_per_cell, 1.0 / D)));
  int p = 1;
  for (int a = 0; a < D; ++a) p *= s;
  if (p != particles_per_cell)
    throw std::invalid_argument("particles_per_cell must be a D-th power");
  return s;
}

//! stratified-jittered seeding of bulk particles; the callback returns the
//! initial velocity for positions inside the liquid, or nothing
template <int D, class InsideFn>
inline void seedParticles(SolverState<D>& s, Rng& rng, InsideFn&& inside, double jitter = 1.0) {
  const int sub = seedSubdivisions<D>(s.params.particles_per_cell);
  const double h = s.grid.h;
  for (std::size_t i = 0; i < s.grid.flags.total(); ++i) {
    if (s.grid.flags[i] == CellFlag::Solid) continue;
    const VecI<D> c = s.grid.flags.unflatten(i);
    VecI<D> k;
    k.v.fill(0);
    while (true) {
      Vec<D> pos;
      for (int a = 0; a < D; ++a) {
        const double off = jitter > 0.0 ? 0.5 + jitter * (rng.uniform() - 0.5) : 0.5;
        pos[a] = (c[a] + (k[a] + off) / sub) * h;
      }
      if (auto vel = inside(pos)) s.particles.add(pos, *vel, Role::Bulk);
      int a = 0;
      while (a < D) {
        ++k[a];
        if (k[a] < sub) break;
        k[a] = 0;
        ++a;
      }
      if (a == D) break;
    }
  }
}

}  // namespace mlsplash
