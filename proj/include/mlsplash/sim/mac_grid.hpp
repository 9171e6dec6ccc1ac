/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Staggered (MAC) grid: face velocities, cell-centered level set, pressure
 * and cell flags on a uniform D-dimensional grid
 *
 ******************************************************************************/

#pragma once

#include <cstdint>

#include "mlsplash/core/grid_array.hpp"
#include "mlsplash/core/vec.hpp"

namespace mlsplash {

enum class CellFlag : std::uint8_t { Empty = 0, Fluid = 1, Solid = 2 };

template <int D>
struct SimParams {
  double rho = 1000.0;           // kg/m^3
  Vec<D> gravity;                // m/s^2
  double sigma = 0.0;            // N/m
  double viscosity = 0.0;        // m^2/s, advisory only; the solver runs inviscid
  double cfl = 0.75;             // in (0,1]
  double frame_dt = 0.04;        // seconds
  int particles_per_cell = 1 << D;
};

template <int D>
struct MacGrid {
  VecI<D> res;                          // cells per axis
  double h = 1.0;                       // grid spacing, meters
  std::array<GridArray<D, double>, D> u;  // face velocities, m/s
  GridArray<D, double> phi;             // signed distance, negative inside
  GridArray<D, double> pressure;        // Pa
  GridArray<D, CellFlag> flags;

  MacGrid() { res.v.fill(0); }

  MacGrid(VecI<D> resolution, double spacing) : res(resolution), h(spacing) {
    for (int a = 0; a < D; ++a) u[a] = GridArray<D, double>(res + axisOffset<D>(a));
    phi = GridArray<D, double>(res, 0.0);
    pressure = GridArray<D, double>(res, 0.0);
    flags = GridArray<D, CellFlag>(res, CellFlag::Empty);
  }

  //! closed-box domain: a one-cell solid ring on every side
  void markSolidBoundary() {
    for (std::size_t i = 0; i < flags.total(); ++i) {
      const VecI<D> c = flags.unflatten(i);
      for (int a = 0; a < D; ++a)
        if (c[a] == 0 || c[a] == res[a] - 1) flags[i] = CellFlag::Solid;
    }
  }

  Vec<D> cellCenter(const VecI<D>& c) const { return (toVec(c) + Vec<D>(0.5)) * h; }

  //! world position of a face sample of the given axis component
  Vec<D> facePosition(int axis, const VecI<D>& f) const {
    Vec<D> p = toVec(f) * h;
    for (int a = 0; a < D; ++a)
      if (a != axis) p[a] += 0.5 * h;
    return p;
  }

  Vec<D> domainSize() const { return toVec(res) * h; }

  bool inDomain(const Vec<D>& p) const {
    for (int a = 0; a < D; ++a)
      if (p[a] < 0.0 || p[a] > res[a] * h) return false;
    return true;
  }

  VecI<D> cellOf(const Vec<D>& p) const {
    VecI<D> c;
    for (int a = 0; a < D; ++a) {
      c[a] = static_cast<int>(std::floor(p[a] / h));
      c[a] = std::clamp(c[a], 0, res[a] - 1);
    }
    return c;
  }

  bool isFlag(const VecI<D>& c, CellFlag f) const { return flags.at(c) == f; }

  void clearVelocity() {
    for (int a = 0; a < D; ++a) u[a].fill(0.0);
  }
};

}  // namespace mlsplash
