/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Seeded random stream with fully specified sampling algorithms, so results
 * are bit-identical across platforms and standard library versions
 *
 ******************************************************************************/

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "mlsplash/core/vec.hpp"

namespace mlsplash {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t nextU64() { return gen_(); }

  //! uniform in [0,1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  //! uniform integer in [lo, hi], inclusive
  std::int64_t uniformInt(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(static_cast<std::uint64_t>(uniform() * static_cast<double>(span)) % span);
  }

  //! standard normal via Box-Muller, one spare cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  template <int D>
  Vec<D> uniformVec(const Vec<D>& lo, const Vec<D>& hi) {
    Vec<D> r;
    for (int a = 0; a < D; ++a) r[a] = uniform(lo[a], hi[a]);
    return r;
  }

  //! derive an independent stream id from a base seed and a stream index
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mlsplash
