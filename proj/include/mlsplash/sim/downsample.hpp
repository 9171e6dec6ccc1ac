/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Field down-sampling from a fine grid to a coarse target-scale grid
 *
 ******************************************************************************/

#pragma once

#include <stdexcept>

#include "mlsplash/sim/mac_grid.hpp"

namespace mlsplash {

//! box-average cell fields and co-located faces to a factor-times coarser grid.
//! Flags: majority-solid wins, otherwise the averaged level-set sign decides.
template <int D>
inline MacGrid<D> downsample(const MacGrid<D>& fine, int factor) {
  if (factor < 1) throw std::invalid_argument("downsample: factor must be >= 1");
  VecI<D> cres;
  for (int a = 0; a < D; ++a) {
    if (fine.res[a] % factor != 0)
      throw std::invalid_argument("downsample: resolution not divisible by factor");
    cres[a] = fine.res[a] / factor;
  }
  MacGrid<D> coarse(cres, fine.h * factor);
  if (factor == 1) {
    coarse = fine;
    return coarse;
  }

  // cell-centered fields and flags
  std::size_t cells_per_block = 1;
  for (int a = 0; a < D; ++a) cells_per_block *= static_cast<std::size_t>(factor);
  for (std::size_t ci = 0; ci < coarse.phi.total(); ++ci) {
    const VecI<D> cc = coarse.phi.unflatten(ci);
    double phi_sum = 0.0, p_sum = 0.0;
    std::size_t solid = 0;
    VecI<D> off;
    off.v.fill(0);
    while (true) {
      VecI<D> fc;
      for (int a = 0; a < D; ++a) fc[a] = cc[a] * factor + off[a];
      phi_sum += fine.phi.at(fc);
      p_sum += fine.pressure.at(fc);
      solid += fine.flags.at(fc) == CellFlag::Solid;
      int a = 0;
      while (a < D) {
        ++off[a];
        if (off[a] < factor) break;
        off[a] = 0;
        ++a;
      }
      if (a == D) break;
    }
    const double inv = 1.0 / static_cast<double>(cells_per_block);
    coarse.phi[ci] = phi_sum * inv;
    coarse.pressure[ci] = p_sum * inv;
    if (2 * solid > cells_per_block)
      coarse.flags[ci] = CellFlag::Solid;
    else
      coarse.flags[ci] = coarse.phi[ci] < 0.0 ? CellFlag::Fluid : CellFlag::Empty;
  }

  // faces: average the factor^(D-1) fine face samples lying on the coarse face
  for (int axis = 0; axis < D; ++axis) {
    const std::size_t samples = cells_per_block / static_cast<std::size_t>(factor);
    for (std::size_t fi = 0; fi < coarse.u[axis].total(); ++fi) {
      const VecI<D> cf = coarse.u[axis].unflatten(fi);
      double sum = 0.0;
      VecI<D> off;
      off.v.fill(0);
      while (true) {
        VecI<D> ff;
        for (int a = 0; a < D; ++a)
          ff[a] = a == axis ? cf[a] * factor : cf[a] * factor + off[a];
        sum += fine.u[axis].at(ff);
        int a = 0;
        while (a < D) {
          if (a == axis) {
            ++a;
            continue;
          }
          ++off[a];
          if (off[a] < factor) break;
          off[a] = 0;
          ++a;
        }
        if (a == D) break;
      }
      coarse.u[axis][fi] = sum / static_cast<double>(samples);
    }
  }
  return coarse;
}

}  // namespace mlsplash
