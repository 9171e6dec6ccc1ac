/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Feature descriptor: a 3^D stencil of interpolated velocity and level-set
 * samples around a position, stencil spacing equal to the grid spacing
 *
 ******************************************************************************/

#pragma once

#include <vector>

#include "mlsplash/sim/interpolate.hpp"

namespace mlsplash {

inline int featureLength(int dim, bool scale_feature) {
  int p = 1;
  for (int a = 0; a < dim; ++a) p *= 3;
  return p * (dim + 1) + (scale_feature ? 1 : 0);
}

//! layout: all velocity samples (offset-major, x fastest; D components each),
//! then all level-set samples in the same offset order, then the grid spacing
//! when the scale feature is enabled
template <int D>
inline void extractFeature(const MacGrid<D>& g, const Vec<D>& pos, bool scale_feature,
                           std::vector<double>& out) {
  constexpr int kOffsets = D == 2 ? 9 : 27;
  out.clear();
  out.reserve(static_cast<std::size_t>(featureLength(D, scale_feature)));
  for (int k = 0; k < kOffsets; ++k) {
    int rem = k;
    Vec<D> sp = pos;
    for (int a = 0; a < D; ++a) {
      sp[a] += (rem % 3 - 1) * g.h;
      rem /= 3;
    }
    const Vec<D> v = interpVelocity(g, sp);
    for (int a = 0; a < D; ++a) out.push_back(v[a]);
  }
  for (int k = 0; k < kOffsets; ++k) {
    int rem = k;
    Vec<D> sp = pos;
    for (int a = 0; a < D; ++a) {
      sp[a] += (rem % 3 - 1) * g.h;
      rem /= 3;
    }
    out.push_back(interpPhi(g, sp));
  }
  if (scale_feature) out.push_back(g.h);
}

}  // namespace mlsplash
