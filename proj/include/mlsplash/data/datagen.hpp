/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Dataset generation: run randomized fine-scale scenes, extract coarse-grid
 * features for surface particles, label the frame windows, balance
 *
 ******************************************************************************/

#pragma once

#include <string>
#include <vector>

#include "mlsplash/data/dataset.hpp"
#include "mlsplash/data/feature.hpp"
#include "mlsplash/data/labeling.hpp"
#include "mlsplash/data/scene.hpp"
#include "mlsplash/sim/downsample.hpp"
#include "mlsplash/sim/surface.hpp"

namespace mlsplash {

struct DatagenOptions {
  int n_scenes = 10;
  bool scale_feature = false;
  int droplet_max_cells = 0;  // 0 selects the dimension default
  bool balance = true;
};

//! extract one scene's worth of samples into the dataset
template <int D>
inline void extractSceneSamples(SolverState<D>& s, const SceneConfig<D>& cfg,
                                const DatagenOptions& opt, Dataset& out) {
  const int factor = cfg.coarse_factor;
  const int frames = std::max(2, static_cast<int>(std::lround(cfg.duration / cfg.params.frame_dt)));
  const int max_cells =
      opt.droplet_max_cells > 0 ? opt.droplet_max_cells : defaultDropletMaxCells(D);

  advanceFrame(s);  // bootstrap so the grid carries post-projection fields
  std::vector<std::vector<double>> feats;
  std::vector<double> x;
  for (int frame = 1; frame < frames; ++frame) {
    const MacGrid<D> coarse_t = downsample(s.grid, factor);
    const auto surface = detectSurfaceParticles(s.particles, coarse_t.flags, coarse_t.h);
    const ParticleSet<D> before = s.particles;

    feats.clear();
    feats.reserve(surface.size());
    for (std::size_t idx : surface) {
      extractFeature(coarse_t, s.particles.pos[idx], opt.scale_feature, x);
      feats.push_back(x);
    }

    advanceFrame(s);

    const auto labels =
        labelFramePair(before, s.particles, cfg.res, cfg.h, factor, max_cells);
    const MacGrid<D> coarse_t1 = downsample(s.grid, factor);
    std::vector<double> dv(static_cast<std::size_t>(D), 0.0);
    for (std::size_t k = 0; k < surface.size(); ++k) {
      const std::size_t idx = surface[k];
      const bool splash = labels[idx] != 0;
      std::fill(dv.begin(), dv.end(), 0.0);
      if (splash) {
        const Vec<D> vc = interpVelocity(coarse_t1, s.particles.pos[idx]);
        const Vec<D> d =
            computeDv(before.pos[idx], s.particles.pos[idx], vc, cfg.params.frame_dt);
        for (int a = 0; a < D; ++a) dv[static_cast<std::size_t>(a)] = d[a];
      }
      out.append(feats[k], splash, dv, coarse_t.h);
    }
  }
}

//! run n randomized scenes and assemble the balanced dataset; failed scenes
//! are skipped and reported
template <int D>
inline Dataset generateDataset(const SceneConfig<D>& tmpl, const DatagenOptions& opt,
                               std::vector<std::string>* skipped = nullptr) {
  Dataset out;
  out.dim = D;
  out.scale_feature = opt.scale_feature;
  out.feature_len = static_cast<std::uint32_t>(featureLength(D, opt.scale_feature));
  for (int k = 0; k < opt.n_scenes; ++k) {
    const std::uint64_t seed = Rng::mix(tmpl.seed, static_cast<std::uint64_t>(k));
    try {
      SolverState<D> s = randomizeScene(tmpl, seed);
      extractSceneSamples(s, tmpl, opt, out);
      out.provenance.push_back("scene " + std::to_string(k) + " seed " + std::to_string(seed));
    } catch (const std::exception& e) {
      if (skipped) skipped->push_back("scene " + std::to_string(k) + ": " + e.what());
    }
  }
  if (out.positives() == 0)
    throw std::runtime_error("generateDataset: no positive samples were produced");
  if (opt.balance) {
    Rng rng(Rng::mix(tmpl.seed, 0x9a17));
    out.balance(rng);
  }
  return out;
}

}  // namespace mlsplash
