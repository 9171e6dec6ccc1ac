/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Particle level set: union-of-spheres surface plus fast-sweeping
 * redistancing to a signed distance field
 *
 ******************************************************************************/

#pragma once

#include <cmath>
#include <limits>

#include "mlsplash/sim/mac_grid.hpp"
#include "mlsplash/sim/particles.hpp"

namespace mlsplash {

//! default particle radius for surface reconstruction. 0.8h in 2D; in 3D the
//! radius must exceed half the cell diagonal (0.866h) so that a particle
//! anywhere in a cell keeps its nearest cell center inside the liquid.
inline double particleRadius(double h, int dim) {
  return h * std::max(0.8, 0.505 * std::sqrt(static_cast<double>(dim)));
}

template <int D>
inline double levelSetSentinel(VecI<D> res, double h) {
  double s = 0.0;
  for (int a = 0; a < D; ++a) s += res[a] * h;
  return s;
}

namespace detail {

//! one directional fast-sweeping pass solving the Eikonal |grad d| = 1
template <int D>
inline void sweepPass(GridArray<D, double>& dist, const GridArray<D, std::uint8_t>& frozen,
                      double h, int dirmask) {
  const VecI<D> n = dist.size();
  VecI<D> start, stop, step;
  for (int a = 0; a < D; ++a) {
    if (dirmask & (1 << a)) {
      start[a] = n[a] - 1;
      stop[a] = -1;
      step[a] = -1;
    } else {
      start[a] = 0;
      stop[a] = n[a];
      step[a] = 1;
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  VecI<D> c = start;
  while (true) {
    const std::size_t idx = dist.flatten(c);
    if (!frozen[idx]) {
      double m[D];
      int cnt = 0;
      for (int a = 0; a < D; ++a) {
        double best = inf;
        VecI<D> nb = c;
        if (c[a] > 0) {
          nb[a] = c[a] - 1;
          best = dist.at(nb);
        }
        if (c[a] < n[a] - 1) {
          nb[a] = c[a] + 1;
          best = std::min(best, dist.at(nb));
        }
        if (best < inf) m[cnt++] = best;
      }
      if (cnt > 0) {
        // sort ascending (at most 3 values)
        for (int i = 1; i < cnt; ++i)
          for (int j = i; j > 0 && m[j] < m[j - 1]; --j) std::swap(m[j], m[j - 1]);
        double x = m[0] + h;
        if (cnt >= 2 && x > m[1]) {
          const double diff = m[0] - m[1];
          x = 0.5 * (m[0] + m[1] + std::sqrt(2.0 * h * h - diff * diff));
          if (cnt == 3 && x > m[2]) {
            const double s = m[0] + m[1] + m[2];
            const double q = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
            x = (s + std::sqrt(std::max(0.0, s * s - 3.0 * (q - h * h)))) / 3.0;
          }
        }
        if (x < dist[idx]) dist[idx] = x;
      }
    }
    int a = 0;
    while (a < D) {
      c[a] += step[a];
      if (c[a] != stop[a]) break;
      c[a] = start[a];
      ++a;
    }
    if (a == D) break;
  }
}

}  // namespace detail

//! rebuild signed distances away from the interface; cells adjacent to a sign
//! change keep their values and seed the sweeps. Callers that know additional
//! cells to be exact already can freeze them too.
template <int D>
inline void redistance(GridArray<D, double>& phi, double h, int rounds = 2,
                       const GridArray<D, std::uint8_t>* extra_frozen = nullptr) {
  const VecI<D> n = phi.size();
  GridArray<D, std::uint8_t> frozen(n, 0);
  bool any_frozen = false;
  for (std::size_t i = 0; i < phi.total(); ++i) {
    if (extra_frozen && (*extra_frozen)[i]) {
      frozen[i] = 1;
      any_frozen = true;
      continue;
    }
    const VecI<D> c = phi.unflatten(i);
    const bool neg = phi[i] < 0.0;
    for (int a = 0; a < D && !frozen[i]; ++a) {
      for (int s = -1; s <= 1; s += 2) {
        VecI<D> nb = c;
        nb[a] += s;
        if (!phi.inBounds(nb)) continue;
        if ((phi.at(nb) < 0.0) != neg) {
          frozen[i] = 1;
          any_frozen = true;
          break;
        }
      }
    }
  }
  if (!any_frozen) return;  // single-phase field, nothing to anchor distances to

  const double inf = std::numeric_limits<double>::infinity();
  GridArray<D, double> dist(n, inf);
  GridArray<D, std::uint8_t> negative(n, 0);
  for (std::size_t i = 0; i < phi.total(); ++i) {
    negative[i] = phi[i] < 0.0;
    if (frozen[i]) dist[i] = std::abs(phi[i]);
  }
  for (int r = 0; r < rounds; ++r)
    for (int dir = 0; dir < (1 << D); ++dir) detail::sweepPass<D>(dist, frozen, h, dir);

  const double sentinel = levelSetSentinel<D>(n, h);
  for (std::size_t i = 0; i < phi.total(); ++i) {
    double d = std::isfinite(dist[i]) ? dist[i] : sentinel;
    phi[i] = negative[i] ? -d : d;
  }
}

namespace detail {

//! per-cell particle buckets for direct union-of-spheres evaluations
template <int D>
struct ParticleBins {
  GridArray<D, int> head;
  std::vector<int> next;
  std::vector<Vec<D>> pts;
  double h = 1.0;

  template <class KeepFn>
  ParticleBins(const ParticleSet<D>& parts, VecI<D> res, double spacing, KeepFn&& keep)
      : head(res, -1), h(spacing) {
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (!keep(parts.role[i])) continue;
      VecI<D> c;
      bool ok = true;
      for (int a = 0; a < D; ++a) {
        c[a] = static_cast<int>(std::floor(parts.pos[i][a] / h));
        if (c[a] < 0 || c[a] >= res[a]) ok = false;
      }
      if (!ok) continue;
      next.push_back(head.at(c));
      head.at(c) = static_cast<int>(pts.size());
      pts.push_back(parts.pos[i]);
    }
  }

  //! exact union distance for values up to ~2h; larger values are capped
  double unionDist(const Vec<D>& x, double radius) const {
    double best2 = std::numeric_limits<double>::infinity();
    VecI<D> c;
    for (int a = 0; a < D; ++a)
      c[a] = std::clamp(static_cast<int>(std::floor(x[a] / h)), 0, head.size(a) - 1);
    VecI<D> off;
    off.v.fill(-2);
    while (true) {
      VecI<D> nb = c + off;
      if (head.inBounds(nb)) {
        for (int k = head.at(nb); k >= 0; k = next[static_cast<std::size_t>(k)])
          best2 = std::min(best2, norm2(x - pts[static_cast<std::size_t>(k)]));
      }
      int a = 0;
      while (a < D) {
        ++off[a];
        if (off[a] <= 2) break;
        off[a] = -2;
        ++a;
      }
      if (a == D) break;
    }
    return (std::isfinite(best2) ? std::sqrt(best2) : 3.0 * h) - radius;
  }
};

}  // namespace detail

//! implicit surface from particles: union of spheres of the given radius.
//! Distances within the band come from densely sampled zero crossings of the
//! exact union function; fast sweeping extends them outward.
template <int D, class KeepFn>
inline GridArray<D, double> buildLevelSet(const ParticleSet<D>& parts, VecI<D> res, double h,
                                          double radius, KeepFn&& keep) {
  const double sentinel = levelSetSentinel<D>(res, h);
  GridArray<D, double> phi(res, sentinel);
  const double band = 3.0 * h;
  const double pad = radius + band + 0.5 * h;
  bool any = false;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!keep(parts.role[i])) continue;
    any = true;
    const Vec<D>& p = parts.pos[i];
    VecI<D> lo, hi;
    for (int a = 0; a < D; ++a) {
      lo[a] = std::max(0, static_cast<int>(std::floor((p[a] - pad) / h - 0.5)));
      hi[a] = std::min(res[a] - 1, static_cast<int>(std::ceil((p[a] + pad) / h - 0.5)));
    }
    VecI<D> c = lo;
    while (true) {
      const Vec<D> center = (toVec(c) + Vec<D>(0.5)) * h;
      const double d = norm(center - p) - radius;
      double& cur = phi.at(c);
      if (d < cur) cur = d;
      int a = 0;
      while (a < D) {
        ++c[a];
        if (c[a] <= hi[a]) break;
        c[a] = lo[a];
        ++a;
      }
      if (a == D) break;
    }
  }
  if (!any) return phi;  // all-positive sentinel field

  // cells whose face neighborhood crosses the interface
  GridArray<D, std::uint8_t> surface_cell(res, 0);
  for (std::size_t i = 0; i < phi.total(); ++i) {
    const VecI<D> c = phi.unflatten(i);
    const bool neg = phi[i] < 0.0;
    for (int a = 0; a < D && !surface_cell[i]; ++a) {
      for (int s = -1; s <= 1; s += 2) {
        VecI<D> nb = c;
        nb[a] += s;
        if (phi.inBounds(nb) && (phi.at(nb) < 0.0) != neg) {
          surface_cell[i] = 1;
          break;
        }
      }
    }
  }

  // sample the zero set: crossings of the exact union function on a
  // half-spacing lattice around surface cells
  const detail::ParticleBins<D> bins(parts, res, h, keep);
  std::vector<Vec<D>> cloud;
  {
    const int refine = 2;
    const double rh = h / refine;
    for (std::size_t i = 0; i < phi.total(); ++i) {
      if (!surface_cell[i]) continue;
      const VecI<D> c = phi.unflatten(i);
      // refined lattice over this cell; +axis edges reach into the neighbor,
      // so adjacent surface cells tile the refined lattice completely
      VecI<D> k;
      k.v.fill(0);
      while (true) {
        Vec<D> x;
        for (int a = 0; a < D; ++a) x[a] = (c[a] + 0.5) * h + k[a] * rh;
        const double f0 = bins.unionDist(x, radius);
        for (int a = 0; a < D; ++a) {
          Vec<D> y = x;
          y[a] += rh;
          const double f1 = bins.unionDist(y, radius);
          if ((f0 < 0.0) != (f1 < 0.0)) {
            const double t = f0 / (f0 - f1);
            Vec<D> pt = x;
            pt[a] += t * rh;
            cloud.push_back(pt);
          }
        }
        int a = 0;
        while (a < D) {
          ++k[a];
          if (k[a] < refine) break;
          k[a] = 0;
          ++a;
        }
        if (a == D) break;
      }
    }
  }

  // band distances from the sampled zero set
  GridArray<D, std::uint8_t> frozen(res, 0);
  if (!cloud.empty()) {
    GridArray<D, int> chead(res, -1);
    std::vector<int> cnext(cloud.size(), -1);
    for (std::size_t k = 0; k < cloud.size(); ++k) {
      VecI<D> c;
      bool ok = true;
      for (int a = 0; a < D; ++a) {
        c[a] = static_cast<int>(std::floor(cloud[k][a] / h));
        if (c[a] < 0 || c[a] >= res[a]) ok = false;
      }
      if (!ok) continue;
      cnext[k] = chead.at(c);
      chead.at(c) = static_cast<int>(k);
    }
    const int reach = static_cast<int>(std::ceil(band / h)) + 1;
    for (std::size_t i = 0; i < phi.total(); ++i) {
      // only cells plausibly within the band: raw magnitude is a lower bound
      if (std::abs(phi[i]) > band) continue;
      if (phi[i] >= 0.0) {
        // outside the union the min-over-spheres value is already the exact
        // distance wherever the update windows reached
        frozen[i] = 1;
        continue;
      }
      const VecI<D> c = phi.unflatten(i);
      const Vec<D> center = (toVec(c) + Vec<D>(0.5)) * h;
      double best2 = std::numeric_limits<double>::infinity();
      VecI<D> off;
      off.v.fill(-reach);
      while (true) {
        VecI<D> nb = c + off;
        if (chead.inBounds(nb)) {
          for (int k = chead.at(nb); k >= 0; k = cnext[static_cast<std::size_t>(k)])
            best2 = std::min(best2, norm2(center - cloud[static_cast<std::size_t>(k)]));
        }
        int a = 0;
        while (a < D) {
          ++off[a];
          if (off[a] <= reach) break;
          off[a] = -reach;
          ++a;
        }
        if (a == D) break;
      }
      if (!std::isfinite(best2)) continue;
      const double d = std::sqrt(best2);
      if (d > band + 0.5 * h) continue;
      phi[i] = phi[i] < 0.0 ? -d : d;
      frozen[i] = 1;
    }
  }

  redistance(phi, h, 2, &frozen);
  return phi;
}

template <int D>
inline GridArray<D, double> buildLevelSet(const ParticleSet<D>& parts, VecI<D> res, double h,
                                          double radius) {
  return buildLevelSet(parts, res, h, radius, [](Role r) { return r == Role::Bulk; });
}

//! set Fluid/Empty flags from the level-set sign, leaving Solid cells alone
template <int D>
inline void setFlagsFromPhi(MacGrid<D>& g) {
  for (std::size_t i = 0; i < g.flags.total(); ++i) {
    if (g.flags[i] == CellFlag::Solid) continue;
    g.flags[i] = g.phi[i] < 0.0 ? CellFlag::Fluid : CellFlag::Empty;
  }
}

}  // namespace mlsplash
