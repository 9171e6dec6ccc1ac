/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Particle storage: positions, velocities, stable ids, roles, and the
 * per-particle random-walk expectation accumulator
 *
 ******************************************************************************/

#pragma once

#include <cstdint>
#include <vector>

#include "mlsplash/core/vec.hpp"

namespace mlsplash {

//! Bulk particles carry the liquid; Splash particles fly ballistically until
//! they rejoin the volume; Secondary particles are visual-only copies.
enum class Role : std::uint8_t { Bulk = 0, Splash = 1, Secondary = 2 };

template <int D>
struct ParticleSet {
  std::vector<Vec<D>> pos;
  std::vector<Vec<D>> vel;
  std::vector<std::uint64_t> id;
  std::vector<Role> role;
  std::vector<double> expectation;      // E_i accumulated over the frame window
  std::vector<double> window_elapsed;   // seconds accumulated toward the window
  std::uint64_t next_id = 0;

  std::size_t size() const { return pos.size(); }

  std::uint64_t add(const Vec<D>& p, const Vec<D>& v, Role r = Role::Bulk) {
    pos.push_back(p);
    vel.push_back(v);
    id.push_back(next_id);
    role.push_back(r);
    expectation.push_back(0.0);
    window_elapsed.push_back(0.0);
    return next_id++;
  }

  std::size_t count(Role r) const {
    std::size_t n = 0;
    for (Role x : role) n += (x == r);
    return n;
  }

  //! remove the particles whose indices are marked; ids are never reused
  void removeMarked(const std::vector<std::uint8_t>& marked) {
    std::size_t w = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (marked[i]) continue;
      if (w != i) {
        pos[w] = pos[i];
        vel[w] = vel[i];
        id[w] = id[i];
        role[w] = role[i];
        expectation[w] = expectation[i];
        window_elapsed[w] = window_elapsed[i];
      }
      ++w;
    }
    pos.resize(w);
    vel.resize(w);
    id.resize(w);
    role.resize(w);
    expectation.resize(w);
    window_elapsed.resize(w);
  }
};

}  // namespace mlsplash
