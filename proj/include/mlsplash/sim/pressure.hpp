/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Pressure projection: variable-coefficient Poisson solve with ghost-fluid
 * free-surface conditions (Dirichlet p = sigma*kappa at the interface) and
 * MIC(0)-preconditioned conjugate gradients
 *
 ******************************************************************************/

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlsplash/sim/curvature.hpp"
#include "mlsplash/sim/mac_grid.hpp"

namespace mlsplash {

struct ProjectionError : std::runtime_error {
  double residual;
  explicit ProjectionError(double r)
      : std::runtime_error("pressure solve did not converge, relative residual " +
                           std::to_string(r)),
        residual(r) {}
};

struct PressureResult {
  int iterations = 0;
  double relative_residual = 0.0;
};

namespace detail {

//! liquid fraction along a face axis from the fluid cell toward an empty
//! neighbor; the interface sits at this fraction of the cell spacing
inline double ghostTheta(double phi_fluid, double phi_empty, double clamp_min = 1e-3) {
  const double denom = phi_fluid - phi_empty;
  double theta = denom < -1e-12 ? phi_fluid / denom : 0.5;
  return std::clamp(theta, clamp_min, 1.0);
}

}  // namespace detail

//! maximum absolute velocity divergence over fluid cells, 1/s
template <int D>
inline double maxFluidDivergence(const MacGrid<D>& g) {
  double worst = 0.0;
  for (std::size_t i = 0; i < g.flags.total(); ++i) {
    if (g.flags[i] != CellFlag::Fluid) continue;
    const VecI<D> c = g.flags.unflatten(i);
    double div = 0.0;
    for (int a = 0; a < D; ++a) div += g.u[a].at(c + axisOffset<D>(a)) - g.u[a].at(c);
    div /= g.h;
    worst = std::max(worst, std::abs(div));
  }
  return worst;
}

//! project face velocities to a divergence-free field. Solid faces are kept at
//! zero normal velocity; empty neighbors impose p = sigma*kappa at the
//! phi crossing through ghost-fluid fractions.
template <int D>
inline PressureResult projectPressure(MacGrid<D>& g, const SimParams<D>& params, double dt,
                                      double tol = 1e-5, int max_iter = 2000) {
  if (dt <= 0.0) throw std::invalid_argument("projectPressure: dt must be positive");
  const double h = g.h;
  const double scale = dt / (params.rho * h * h);

  enforceSolidFaces(g);

  // fluid cell list
  std::vector<std::size_t> fluid;
  GridArray<D, int> index(g.flags.size(), -1);
  for (std::size_t i = 0; i < g.flags.total(); ++i) {
    if (g.flags[i] == CellFlag::Fluid) {
      index[i] = static_cast<int>(fluid.size());
      fluid.push_back(i);
    }
  }
  g.pressure.fill(0.0);
  if (fluid.empty()) return {};

  GridArray<D, double> kappa;
  const bool with_tension = params.sigma != 0.0;
  if (with_tension) kappa = curvatureGrid(g.phi, h);

  const std::size_t n = fluid.size();
  std::vector<double> adiag(n, 0.0), rhs(n, 0.0);
  std::array<std::vector<double>, D> aplus;  // coefficient toward the +axis fluid neighbor
  for (int a = 0; a < D; ++a) aplus[a].assign(n, 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t idx = fluid[k];
    const VecI<D> c = g.flags.unflatten(idx);
    double div = 0.0;
    for (int a = 0; a < D; ++a)
      div += g.u[a].at(c + axisOffset<D>(a)) - g.u[a].at(c);
    div /= h;
    rhs[k] = -div;

    for (int a = 0; a < D; ++a) {
      for (int s = -1; s <= 1; s += 2) {
        VecI<D> nb = c;
        nb[a] += s;
        const CellFlag f = g.flags.inBounds(nb) ? g.flags.at(nb) : CellFlag::Solid;
        if (f == CellFlag::Solid) continue;
        if (f == CellFlag::Fluid) {
          adiag[k] += scale;
          if (s > 0) aplus[a][k] = -scale;
        } else {
          const double theta = detail::ghostTheta(g.phi[idx], g.phi.at(nb));
          adiag[k] += scale / theta;
          if (with_tension) {
            // p_s / theta with kappa blended to the interface location
            const double ki = kappa[idx];
            const double kn = kappa.at(nb);
            rhs[k] += scale * params.sigma * (kn + (1.0 / theta - 1.0) * ki);
          }
        }
      }
    }
  }

  // MIC(0) preconditioner (Bridson), tuned constants tau/safety
  std::vector<double> precon(n, 0.0);
  {
    const double tau = 0.97, safety = 0.25;
    for (std::size_t k = 0; k < n; ++k) {
      const VecI<D> c = g.flags.unflatten(fluid[k]);
      double e = adiag[k];
      for (int a = 0; a < D; ++a) {
        VecI<D> nb = c;
        nb[a] -= 1;
        if (!g.flags.inBounds(nb)) continue;
        const int kn = index.at(nb);
        if (kn < 0) continue;
        const double ap = aplus[a][static_cast<std::size_t>(kn)];
        const double pre = precon[static_cast<std::size_t>(kn)];
        e -= (ap * pre) * (ap * pre);
        double others = 0.0;
        for (int b = 0; b < D; ++b)
          if (b != a) others += aplus[b][static_cast<std::size_t>(kn)];
        e -= tau * ap * others * pre * pre;
      }
      if (e < safety * adiag[k]) e = adiag[k];
      precon[k] = e > 0.0 ? 1.0 / std::sqrt(e) : 0.0;
    }
  }

  auto applyPrecon = [&](const std::vector<double>& r, std::vector<double>& z,
                         std::vector<double>& q) {
    // forward solve L q = r
    for (std::size_t k = 0; k < n; ++k) {
      const VecI<D> c = g.flags.unflatten(fluid[k]);
      double t = r[k];
      for (int a = 0; a < D; ++a) {
        VecI<D> nb = c;
        nb[a] -= 1;
        if (!g.flags.inBounds(nb)) continue;
        const int kn = index.at(nb);
        if (kn < 0) continue;
        t -= aplus[a][static_cast<std::size_t>(kn)] * precon[static_cast<std::size_t>(kn)] *
             q[static_cast<std::size_t>(kn)];
      }
      q[k] = t * precon[k];
    }
    // backward solve L^T z = q
    for (std::size_t k = n; k-- > 0;) {
      const VecI<D> c = g.flags.unflatten(fluid[k]);
      double t = q[k];
      for (int a = 0; a < D; ++a) {
        VecI<D> nb = c;
        nb[a] += 1;
        if (!g.flags.inBounds(nb)) continue;
        const int kn = index.at(nb);
        if (kn < 0) continue;
        t -= aplus[a][k] * precon[k] * z[static_cast<std::size_t>(kn)];
      }
      z[k] = t * precon[k];
    }
  };

  auto applyA = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t k = 0; k < n; ++k) {
      const VecI<D> c = g.flags.unflatten(fluid[k]);
      double t = adiag[k] * x[k];
      for (int a = 0; a < D; ++a) {
        VecI<D> hi = c, lo = c;
        hi[a] += 1;
        lo[a] -= 1;
        if (g.flags.inBounds(hi)) {
          const int kn = index.at(hi);
          if (kn >= 0) t += aplus[a][k] * x[static_cast<std::size_t>(kn)];
        }
        if (g.flags.inBounds(lo)) {
          const int kn = index.at(lo);
          if (kn >= 0) t += aplus[a][static_cast<std::size_t>(kn)] * x[static_cast<std::size_t>(kn)];
        }
      }
      y[k] = t;
    }
  };

  auto dotv = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
  };

  std::vector<double> p(n, 0.0), r = rhs, z(n, 0.0), q(n, 0.0), s(n, 0.0), As(n, 0.0);
  const double bnorm = std::sqrt(dotv(rhs, rhs));
  PressureResult result;
  if (bnorm > 0.0) {
    applyPrecon(r, z, q);
    s = z;
    double sigma_rz = dotv(r, z);
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
      applyA(s, As);
      const double sAs = dotv(s, As);
      if (sAs <= 0.0) break;  // matrix is SPD; a null step means r is solved
      const double alpha = sigma_rz / sAs;
      for (std::size_t k = 0; k < n; ++k) {
        p[k] += alpha * s[k];
        r[k] -= alpha * As[k];
      }
      result.iterations = it + 1;
      const double rnorm = std::sqrt(dotv(r, r));
      result.relative_residual = rnorm / bnorm;
      if (result.relative_residual <= tol) {
        converged = true;
        break;
      }
      applyPrecon(r, z, q);
      const double sigma_new = dotv(r, z);
      const double beta = sigma_new / sigma_rz;
      sigma_rz = sigma_new;
      for (std::size_t k = 0; k < n; ++k) s[k] = z[k] + beta * s[k];
    }
    if (!converged && result.relative_residual > tol) throw ProjectionError(result.relative_residual);
  }

  for (std::size_t k = 0; k < n; ++k) g.pressure[fluid[k]] = p[k];

  // subtract dt/rho * grad P from face velocities, with one-sided ghost
  // gradients across the free surface
  const double gscale = dt / (params.rho * h);
  for (int axis = 0; axis < D; ++axis) {
    for (std::size_t i = 0; i < g.u[axis].total(); ++i) {
      const VecI<D> f = g.u[axis].unflatten(i);
      VecI<D> hi = f, lo = f;
      lo[axis] -= 1;
      const bool hi_in = g.flags.inBounds(hi);
      const bool lo_in = g.flags.inBounds(lo);
      const CellFlag fh = hi_in ? g.flags.at(hi) : CellFlag::Solid;
      const CellFlag fl = lo_in ? g.flags.at(lo) : CellFlag::Solid;
      if (fh == CellFlag::Solid || fl == CellFlag::Solid) {
        g.u[axis][i] = 0.0;
        continue;
      }
      if (fh != CellFlag::Fluid && fl != CellFlag::Fluid) continue;
      double p_hi, p_lo;
      if (fh == CellFlag::Fluid && fl == CellFlag::Fluid) {
        p_hi = g.pressure.at(hi);
        p_lo = g.pressure.at(lo);
      } else if (fh == CellFlag::Fluid) {  // empty below
        p_hi = g.pressure.at(hi);
        const double theta = detail::ghostTheta(g.phi.at(hi), g.phi.at(lo));
        double ps = 0.0;
        if (with_tension)
          ps = params.sigma * ((1.0 - theta) * kappa.at(hi) + theta * kappa.at(lo));
        p_lo = ps / theta + (1.0 - 1.0 / theta) * p_hi;
      } else {  // empty above
        p_lo = g.pressure.at(lo);
        const double theta = detail::ghostTheta(g.phi.at(lo), g.phi.at(hi));
        double ps = 0.0;
        if (with_tension)
          ps = params.sigma * ((1.0 - theta) * kappa.at(lo) + theta * kappa.at(hi));
        p_hi = ps / theta + (1.0 - 1.0 / theta) * p_lo;
      }
      g.u[axis][i] -= gscale * (p_hi - p_lo);
    }
  }
  return result;
}

}  // namespace mlsplash
