/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Model-coupled FLIP: random-walk splash classification over the frame
 * window, per-cell normalization, velocity modification, look-ahead
 * correction, and the one-way secondary-particle mode
 *
 ******************************************************************************/

#pragma once

#include <array>
#include <functional>
#include <span>

#include "mlsplash/data/feature.hpp"
#include "mlsplash/nn/bundle.hpp"
#include "mlsplash/sim/flip.hpp"
#include "mlsplash/sim/surface.hpp"

namespace mlsplash {

enum class InferenceMode { Coupled, Secondary };

struct InferenceConfig {
  InferenceMode mode = InferenceMode::Coupled;
  double threshold = 0.5;             // Secondary mode: splash when p > threshold
  bool deterministic_variance = false;
  bool per_cell_cap = true;
  int secondary_samples = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (threshold < 0.0 || threshold > 1.0)
      throw std::invalid_argument("inference: threshold must be in [0,1]");
    if (secondary_samples < 1)
      throw std::invalid_argument("inference: secondary_samples must be >= 1");
  }
};

using ClassifyFn = std::function<std::array<double, 2>(std::span<const double>)>;
using ModifyFn =
    std::function<void(std::span<const double>, std::vector<double>&, std::vector<double>&)>;

inline ClassifyFn bundleClassifier(const ModelBundle& m) {
  return [&m](std::span<const double> x) { return m.classify(x); };
}

inline ModifyFn bundleModifier(const ModelBundle& m) {
  return [&m](std::span<const double> x, std::vector<double>& mu, std::vector<double>& s2) {
    m.modify(x, mu, s2);
  };
}

struct FrameStats {
  int decisions = 0;   // positive outcomes before cap and look-ahead
  int capped = 0;      // removed by the per-cell cap
  int confirmed = 0;   // splashes committed (or secondary sources kept)
  int reverted = 0;    // look-ahead reverts
  int spawned = 0;     // secondary particles added
  std::vector<std::uint64_t> decision_ids;  // sorted, before cap and look-ahead
};

//! Eq-style random-walk increment: outcomes +1 (splash) and -1 (non-splash)
//! scaled so the accumulated expectation is independent of the substep count
inline double expectationIncrement(const std::array<double, 2>& y, double dt, double window) {
  return std::sqrt(dt / window) * (y[0] - y[1]);
}

template <int D>
struct SplashCandidate {
  std::size_t index;
  std::uint64_t id;
  std::size_t cell;
  double score;  // expectation (coupled) or probability (secondary)
};

//! keep only the best-scoring candidate per cell; ties go to the lower id
template <int D>
inline std::vector<SplashCandidate<D>> applyPerCellCap(std::vector<SplashCandidate<D>> cands) {
  std::unordered_map<std::size_t, std::size_t> best;  // cell -> index into cands
  for (std::size_t k = 0; k < cands.size(); ++k) {
    auto [it, inserted] = best.try_emplace(cands[k].cell, k);
    if (!inserted) {
      const SplashCandidate<D>& cur = cands[it->second];
      const SplashCandidate<D>& nv = cands[k];
      if (nv.score > cur.score || (nv.score == cur.score && nv.id < cur.id)) it->second = k;
    }
  }
  std::vector<SplashCandidate<D>> out;
  out.reserve(best.size());
  for (std::size_t k = 0; k < cands.size(); ++k)
    if (best.at(cands[k].cell) == k) out.push_back(cands[k]);
  return out;
}

//! componentwise normal sample around the predicted mean; deterministic mode
//! returns the mean itself
template <int D>
inline Vec<D> sampleModification(const std::vector<double>& mu, const std::vector<double>& sigma2,
                                 Rng& rng, bool deterministic) {
  Vec<D> dv;
  for (int a = 0; a < D; ++a) {
    const std::size_t j = static_cast<std::size_t>(a);
    dv[a] = deterministic ? mu[j] : rng.normal(mu[j], std::sqrt(sigma2[j]));
  }
  return dv;
}

//! level set of the bulk volume advanced by one frame window with the current
//! grid velocities; candidates themselves are excluded
template <int D>
inline GridArray<D, double> predictedLevelSet(const SolverState<D>& s, double window,
                                              const std::vector<std::uint8_t>& exclude) {
  ParticleSet<D> pred;
  for (std::size_t i = 0; i < s.particles.size(); ++i) {
    if (s.particles.role[i] != Role::Bulk) continue;
    if (!exclude.empty() && exclude[i]) continue;
    const Vec<D>& p = s.particles.pos[i];
    pred.add(p + window * interpVelocity(s.grid, p), Vec<D>{}, Role::Bulk);
  }
  return buildLevelSet(pred, s.grid.res, s.grid.h, s.particle_radius);
}

//! a candidate is reverted when its predicted endpoint sits inside the
//! predicted liquid, inside a solid, or outside the domain
template <int D>
inline bool lookaheadReverts(const SolverState<D>& s, const GridArray<D, double>& predicted_phi,
                             const Vec<D>& endpoint) {
  if (!s.grid.inDomain(endpoint)) return true;
  if (interpCellField(s.solid_phi, s.grid.h, endpoint) < 0.0) return true;
  return interpCellField(predicted_phi, s.grid.h, endpoint) < 0.0;
}

//! drives a solver state through frame windows with splash inference
template <int D>
class MlflipRunner {
 public:
  MlflipRunner(SolverState<D>* state, InferenceConfig cfg, ClassifyFn classify, ModifyFn modify,
               bool scale_feature = false)
      : s_(state),
        cfg_(cfg),
        classify_(std::move(classify)),
        modify_(std::move(modify)),
        scale_feature_(scale_feature),
        rng_(Rng::mix(cfg.seed, 0xF1)) {
    cfg.validate();
  }

  int forced_substeps = 0;

  FrameStats advanceFrame() {
    stats_ = FrameStats{};
    struct Hooks {
      MlflipRunner* r;
      void afterProjection(SolverState<D>& s, double dt, bool frame_end) {
        r->accumulate(s, dt);
        (void)frame_end;
      }
      void afterParticleUpdate(SolverState<D>& s, double dt, bool frame_end) {
        (void)dt;
        if (frame_end) r->decide(s);
      }
    } hooks{this};
    mlsplash::advanceFrame(*s_, hooks, forced_substeps);
    return stats_;
  }

  const FrameStats& lastStats() const { return stats_; }

 private:
  void accumulate(SolverState<D>& s, double dt) {
    const double window = s.params.frame_dt;
    if (cfg_.mode == InferenceMode::Coupled) {
      const auto surface = detectSurfaceParticles(s.particles, s.grid.flags, s.grid.h);
      for (std::size_t idx : surface) {
        extractFeature(s.grid, s.particles.pos[idx], scale_feature_, feat_);
        const auto y = classify_(feat_);
        s.particles.expectation[idx] += expectationIncrement(y, dt, window);
      }
    }
    for (std::size_t i = 0; i < s.particles.size(); ++i)
      if (s.particles.role[i] == Role::Bulk) s.particles.window_elapsed[i] += dt;
  }

  void decide(SolverState<D>& s) {
    if (cfg_.mode == InferenceMode::Coupled)
      decideCoupled(s);
    else
      decideSecondary(s);
    for (std::size_t i = 0; i < s.particles.size(); ++i) {
      s.particles.expectation[i] = 0.0;
      s.particles.window_elapsed[i] = 0.0;
    }
  }

  void decideCoupled(SolverState<D>& s) {
    std::vector<SplashCandidate<D>> cands;
    for (std::size_t i = 0; i < s.particles.size(); ++i) {
      if (s.particles.role[i] != Role::Bulk) continue;
      if (s.particles.expectation[i] > 0.0) {
        cands.push_back({i, s.particles.id[i], s.grid.flags.flatten(s.grid.cellOf(s.particles.pos[i])),
                         s.particles.expectation[i]});
      }
    }
    stats_.decisions = static_cast<int>(cands.size());
    stats_.decision_ids.clear();
    for (const auto& c : cands) stats_.decision_ids.push_back(c.id);
    std::sort(stats_.decision_ids.begin(), stats_.decision_ids.end());
    if (cands.empty()) return;

    if (cfg_.per_cell_cap) {
      const std::size_t before = cands.size();
      cands = applyPerCellCap<D>(std::move(cands));
      stats_.capped = static_cast<int>(before - cands.size());
    }

    // velocity modification
    std::vector<Vec<D>> old_vel(cands.size());
    for (std::size_t k = 0; k < cands.size(); ++k) {
      const std::size_t i = cands[k].index;
      old_vel[k] = s.particles.vel[i];
      extractFeature(s.grid, s.particles.pos[i], scale_feature_, feat_);
      modify_(feat_, mu_, sigma2_);
      s.particles.vel[i] += sampleModification<D>(mu_, sigma2_, rng_, cfg_.deterministic_variance);
    }

    // look-ahead over the full window with the already-modified velocities
    std::vector<std::uint8_t> exclude(s.particles.size(), 0);
    for (const auto& c : cands) exclude[c.index] = 1;
    const auto predicted = predictedLevelSet(s, s.params.frame_dt, exclude);
    for (std::size_t k = 0; k < cands.size(); ++k) {
      const std::size_t i = cands[k].index;
      const Vec<D> endpoint = s.particles.pos[i] + s.params.frame_dt * s.particles.vel[i];
      if (lookaheadReverts(s, predicted, endpoint)) {
        s.particles.vel[i] = old_vel[k];
        ++stats_.reverted;
      } else {
        s.particles.role[i] = Role::Splash;
        ++stats_.confirmed;
      }
    }
  }

  void decideSecondary(SolverState<D>& s) {
    const auto surface = detectSurfaceParticles(s.particles, s.grid.flags, s.grid.h);
    std::vector<SplashCandidate<D>> cands;
    stats_.decision_ids.clear();
    for (std::size_t idx : surface) {
      extractFeature(s.grid, s.particles.pos[idx], scale_feature_, feat_);
      const auto y = classify_(feat_);
      if (y[0] > cfg_.threshold) {
        cands.push_back({idx, s.particles.id[idx],
                         s.grid.flags.flatten(s.grid.cellOf(s.particles.pos[idx])), y[0]});
        stats_.decision_ids.push_back(s.particles.id[idx]);
      }
    }
    std::sort(stats_.decision_ids.begin(), stats_.decision_ids.end());
    stats_.decisions = static_cast<int>(cands.size());
    if (cands.empty()) return;

    if (cfg_.per_cell_cap) {
      const std::size_t before = cands.size();
      cands = applyPerCellCap<D>(std::move(cands));
      stats_.capped = static_cast<int>(before - cands.size());
    }

    // one-way coupling: simulation particles are never altered, predicted
    // bulk volume therefore includes every bulk particle
    const auto predicted = predictedLevelSet(s, s.params.frame_dt, {});
    for (const auto& c : cands) {
      extractFeature(s.grid, s.particles.pos[c.index], scale_feature_, feat_);
      modify_(feat_, mu_, sigma2_);
      bool kept_any = false;
      for (int k = 0; k < cfg_.secondary_samples; ++k) {
        const Vec<D> vel =
            s.particles.vel[c.index] +
            sampleModification<D>(mu_, sigma2_, rng_, cfg_.deterministic_variance);
        const Vec<D> endpoint = s.particles.pos[c.index] + s.params.frame_dt * vel;
        if (lookaheadReverts(s, predicted, endpoint)) {
          ++stats_.reverted;
          continue;
        }
        s.particles.add(s.particles.pos[c.index], vel, Role::Secondary);
        ++stats_.spawned;
        kept_any = true;
      }
      if (kept_any) ++stats_.confirmed;
    }
  }

  SolverState<D>* s_;
  InferenceConfig cfg_;
  ClassifyFn classify_;
  ModifyFn modify_;
  bool scale_feature_;
  Rng rng_;
  FrameStats stats_;
  std::vector<double> feat_, mu_, sigma2_;
};

}  // namespace mlsplash
