/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Tests for features, labeling, Delta-v targets, scenes and dataset files
 *
 ******************************************************************************/

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

#include "mlsplash/data/datagen.hpp"

using namespace mlsplash;

namespace {

std::string tempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

//! independent frame-pair labeling oracle built on id-set maps, written
//! without the library's component bookkeeping
template <int D>
std::vector<std::uint8_t> oracleLabels(const ParticleSet<D>& at_t, const ParticleSet<D>& at_t1,
                                       VecI<D> cres, double ch, int max_cells) {
  auto clusters = [&](const ParticleSet<D>& parts) {
    // map cell -> particle indices, then merge face-adjacent cells greedily
    std::map<std::vector<int>, std::vector<std::size_t>> bycell;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts.role[i] != Role::Bulk) continue;
      std::vector<int> key(D);
      bool ok = true;
      for (int a = 0; a < D; ++a) {
        key[static_cast<std::size_t>(a)] = static_cast<int>(std::floor(parts.pos[i][a] / ch));
        if (key[static_cast<std::size_t>(a)] < 0 || key[static_cast<std::size_t>(a)] >= cres[a])
          ok = false;
      }
      if (ok) bycell[key].push_back(i);
    }
    // iterative merging of adjacent occupied cells into groups
    std::vector<std::vector<std::vector<int>>> groups;
    std::set<std::vector<int>> seen;
    for (const auto& [cell, _] : bycell) {
      if (seen.contains(cell)) continue;
      std::vector<std::vector<int>> group;
      std::vector<std::vector<int>> todo{cell};
      seen.insert(cell);
      while (!todo.empty()) {
        auto cur = todo.back();
        todo.pop_back();
        group.push_back(cur);
        for (int a = 0; a < D; ++a) {
          for (int s = -1; s <= 1; s += 2) {
            auto nb = cur;
            nb[static_cast<std::size_t>(a)] += s;
            if (bycell.contains(nb) && !seen.contains(nb)) {
              seen.insert(nb);
              todo.push_back(nb);
            }
          }
        }
      }
      groups.push_back(group);
    }
    // resolve to per-particle group id + group cell counts
    std::map<std::vector<int>, int> cell_group;
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (const auto& cell : groups[g]) cell_group[cell] = static_cast<int>(g);
    std::vector<int> particle_group(parts.size(), -1);
    for (const auto& [cell, members] : bycell)
      for (std::size_t i : members) particle_group[i] = cell_group[cell];
    std::vector<std::size_t> group_cells(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) group_cells[g] = groups[g].size();
    return std::pair(particle_group, group_cells);
  };

  const auto [group_t, cells_t] = clusters(at_t);
  const auto [group_t1, cells_t1] = clusters(at_t1);
  std::vector<std::uint8_t> small_t(at_t.size(), 0);
  for (std::size_t i = 0; i < at_t.size(); ++i)
    if (group_t[i] >= 0 &&
        cells_t[static_cast<std::size_t>(group_t[i])] < static_cast<std::size_t>(max_cells))
      small_t[i] = 1;

  std::map<int, bool> fresh;
  for (std::size_t i = 0; i < at_t1.size(); ++i) {
    if (group_t1[i] < 0 ||
        cells_t1[static_cast<std::size_t>(group_t1[i])] >= static_cast<std::size_t>(max_cells))
      continue;
    auto [it, ins] = fresh.try_emplace(group_t1[i], true);
    if (small_t[i]) it->second = false;
  }
  std::vector<std::uint8_t> labels(at_t.size(), 0);
  for (std::size_t i = 0; i < at_t1.size(); ++i) {
    if (group_t1[i] < 0) continue;
    auto it = fresh.find(group_t1[i]);
    if (it != fresh.end() && it->second) labels[i] = 1;
  }
  return labels;
}

}  // namespace

TEST_CASE("feature length matches the descriptor definition") {
  CHECK(featureLength(3, false) == 108);
  CHECK(featureLength(2, false) == 27);
  CHECK(featureLength(2, true) == 28);
  CHECK(featureLength(3, true) == 109);
}

TEST_CASE("feature blocks: velocities first, then level set") {
  MacGrid<2> g({8, 8}, 0.1);
  g.phi.fill(1.0);
  std::vector<double> x;
  extractFeature(g, Vec<2>{0.4, 0.4}, false, x);
  REQUIRE(x.size() == 27);
  for (int k = 0; k < 18; ++k) CHECK(x[static_cast<std::size_t>(k)] == 0.0);
  for (int k = 18; k < 27; ++k) CHECK(x[static_cast<std::size_t>(k)] == 1.0);
}

TEST_CASE("feature extraction is deterministic with fixed ordering") {
  MacGrid<2> g({8, 8}, 0.1);
  Rng rng(2);
  for (int a = 0; a < 2; ++a)
    for (std::size_t i = 0; i < g.u[a].total(); ++i) g.u[a][i] = rng.uniform(-1, 1);
  for (std::size_t i = 0; i < g.phi.total(); ++i) g.phi[i] = rng.uniform(-1, 1);
  std::vector<double> a, b;
  extractFeature(g, Vec<2>{0.33, 0.41}, true, a);
  extractFeature(g, Vec<2>{0.33, 0.41}, true, b);
  CHECK(a == b);
  CHECK(a.size() == 28);
  CHECK(a.back() == 0.1);  // scale feature is the grid spacing
}

TEST_CASE("labeling: pool stays, fresh droplet fires, old droplet does not") {
  const double h = 0.01;
  const VecI<2> res{32, 32};
  ParticleSet<2> at_t;
  // main pool: a 10x4 block of cells, one particle per cell
  for (int j = 1; j <= 4; ++j)
    for (int i = 1; i <= 10; ++i)
      at_t.add(Vec<2>{(i + 0.5) * h, (j + 0.5) * h}, Vec<2>{}, Role::Bulk);
  // pre-existing 2-cell droplet
  const std::size_t old_a = at_t.size();
  at_t.add(Vec<2>{(20 + 0.5) * h, (20 + 0.5) * h}, Vec<2>{}, Role::Bulk);
  at_t.add(Vec<2>{(21 + 0.5) * h, (20 + 0.5) * h}, Vec<2>{}, Role::Bulk);
  // the particle that will be ejected
  const std::size_t eject = 5;

  ParticleSet<2> at_t1 = at_t;
  at_t1.pos[eject] = Vec<2>{(28 + 0.5) * h, (28 + 0.5) * h};

  const auto labels = labelFramePair(at_t, at_t1, res, h, 1, 4);
  CHECK(labels[eject] == 1);
  CHECK(labels[0] == 0);          // pool particle
  CHECK(labels[old_a] == 0);      // persisting droplet particle
  CHECK(labels[old_a + 1] == 0);

  // pure function: repeated evaluation agrees
  CHECK(labelFramePair(at_t, at_t1, res, h, 1, 4) == labels);
}

TEST_CASE("labeling requires matching particle ids") {
  ParticleSet<2> a, b;
  a.add(Vec<2>{0.05, 0.05}, Vec<2>{}, Role::Bulk);
  b.add(Vec<2>{0.05, 0.05}, Vec<2>{}, Role::Bulk);
  b.id[0] = 99;
  CHECK_THROWS_AS(labelFramePair(a, b, VecI<2>{8, 8}, 0.1, 1, 4), std::invalid_argument);
}

TEST_CASE("labeling agrees with an independent tracking oracle") {
  Rng rng(77);
  const double h = 0.01;
  const VecI<2> res{32, 32};
  for (int trial = 0; trial < 25; ++trial) {
    ParticleSet<2> at_t;
    // random pool block
    const int pw = 6 + static_cast<int>(rng.uniformInt(0, 12));
    for (int j = 1; j <= 5; ++j)
      for (int i = 1; i <= pw; ++i)
        at_t.add(Vec<2>{(i + 0.5) * h, (j + 0.5) * h}, Vec<2>{}, Role::Bulk);
    // scattered droplets
    const int nd = static_cast<int>(rng.uniformInt(0, 5));
    for (int k = 0; k < nd; ++k)
      at_t.add(Vec<2>{rng.uniform(0.02, 0.3), rng.uniform(0.1, 0.3)}, Vec<2>{}, Role::Bulk);
    // move a random subset of particles
    ParticleSet<2> at_t1 = at_t;
    for (std::size_t i = 0; i < at_t1.size(); ++i)
      if (rng.uniform() < 0.25)
        at_t1.pos[i] = Vec<2>{rng.uniform(0.02, 0.3), rng.uniform(0.02, 0.3)};

    const auto got = labelFramePair(at_t, at_t1, res, h, 1, 4);
    const auto want = oracleLabels(at_t, at_t1, res, h, 4);
    CHECK(got == want);
  }
}

TEST_CASE("compute_dv trivial cases and two-scale oracle") {
  CHECK(computeDv(Vec<2>{0, 0}, Vec<2>{1, 0}, Vec<2>{1, 0}, 1.0) == Vec<2>{0, 0});
  CHECK(computeDv(Vec<2>{0, 0}, Vec<2>{2, 0}, Vec<2>{1, 0}, 1.0) == Vec<2>{1, 0});

  // ballistic droplet over a stationary coarse field: dv equals the droplet
  // mean velocity
  MacGrid<2> coarse({8, 8}, 0.1);
  const Vec<2> v{0.35, -0.2};
  const double dt = 0.04;
  const Vec<2> p0{0.3, 0.5};
  const Vec<2> p1 = p0 + dt * v;
  const Vec<2> got = computeDv(p0, p1, interpVelocity(coarse, p1), dt);
  CHECK(got[0] == Catch::Approx(v[0]).epsilon(1e-10));
  CHECK(got[1] == Catch::Approx(v[1]).epsilon(1e-10));

  // quadratic path against the hand-derived closed form
  const Vec<2> a{0.0, -9.81};
  const Vec<2> p1q = p0 + dt * v + 0.5 * dt * dt * a;
  const Vec<2> want = v + 0.5 * dt * a;
  const Vec<2> gotq = computeDv(p0, p1q, Vec<2>{}, dt);
  CHECK(gotq[0] == Catch::Approx(want[0]).margin(1e-10));
  CHECK(gotq[1] == Catch::Approx(want[1]).margin(1e-10));
}

TEST_CASE("randomize_scene is deterministic in (template, seed)") {
  SceneConfig<2> cfg;
  cfg.kind = SceneKind::DropletRain;
  cfg.res = VecI<2>{48, 48};
  cfg.h = 0.005;
  cfg.rand.pool_depth = 0.04;
  cfg.rand.droplet_radius = 0.015;
  cfg.rand.position_min = Vec<2>{0.05, 0.12};
  cfg.rand.position_max = Vec<2>{0.19, 0.2};
  cfg.rand.velocity_min = Vec<2>{-0.5, -2.0};
  cfg.rand.velocity_max = Vec<2>{0.5, -1.0};
  const auto s1 = randomizeScene(cfg, 42);
  const auto s2 = randomizeScene(cfg, 42);
  REQUIRE(s1.particles.size() == s2.particles.size());
  CHECK(s1.particles.pos == s2.particles.pos);
  CHECK(s1.particles.vel == s2.particles.vel);
  CHECK(s1.particles.id == s2.particles.id);
  const auto s3 = randomizeScene(cfg, 43);
  CHECK(s3.particles.pos != s1.particles.pos);
}

TEST_CASE("degenerate droplet count range places exactly that many droplets") {
  SceneConfig<2> cfg;
  cfg.kind = SceneKind::DropletRain;
  cfg.res = VecI<2>{48, 48};
  cfg.h = 0.005;
  cfg.rand.droplet_count_min = cfg.rand.droplet_count_max = 3;
  cfg.rand.pool_depth = 0.03;
  cfg.rand.droplet_radius = 0.012;
  cfg.rand.position_min = Vec<2>{0.04, 0.1};
  cfg.rand.position_max = Vec<2>{0.2, 0.2};
  cfg.rand.velocity_min = Vec<2>{-0.5, -2.0};
  cfg.rand.velocity_max = Vec<2>{0.5, -1.0};
  const auto s = randomizeScene(cfg, 7);
  std::set<std::pair<double, double>> vels;
  for (std::size_t i = 0; i < s.particles.size(); ++i)
    if (norm(s.particles.vel[i]) > 0) vels.insert({s.particles.vel[i][0], s.particles.vel[i][1]});
  CHECK(vels.size() == 3);
}

TEST_CASE("droplet count histogram is uniform over the configured range") {
  SceneConfig<2> cfg;
  cfg.kind = SceneKind::DropletRain;
  cfg.res = VecI<2>{24, 24};
  cfg.h = 0.005;
  cfg.params.particles_per_cell = 4;
  cfg.rand.droplet_count_min = 3;
  cfg.rand.droplet_count_max = 6;
  cfg.rand.pool_depth = 0.01;
  cfg.rand.droplet_radius = 0.006;
  cfg.rand.position_min = Vec<2>{0.02, 0.04};
  cfg.rand.position_max = Vec<2>{0.1, 0.11};
  cfg.rand.velocity_min = Vec<2>{-0.5, -2.0};
  cfg.rand.velocity_max = Vec<2>{0.5, -1.0};
  std::map<std::size_t, int> hist;
  const int trials = 1000;
  for (int k = 0; k < trials; ++k) {
    const auto s = randomizeScene(cfg, static_cast<std::uint64_t>(k));
    std::set<std::pair<double, double>> vels;
    for (std::size_t i = 0; i < s.particles.size(); ++i)
      if (norm(s.particles.vel[i]) > 0)
        vels.insert({s.particles.vel[i][0], s.particles.vel[i][1]});
    hist[vels.size()] += 1;
  }
  REQUIRE(hist.size() == 4);  // counts 3..6 all observed
  double chi2 = 0.0;
  const double expected = trials / 4.0;
  for (const auto& [n, c] : hist) {
    CHECK(n >= 3);
    CHECK(n <= 6);
    chi2 += (c - expected) * (c - expected) / expected;
  }
  CHECK(chi2 < 11.345);  // chi-square critical value, 3 dof, alpha = 0.01
}

TEST_CASE("droplet placement inside solids errors after resampling") {
  SceneConfig<2> cfg;
  cfg.kind = SceneKind::DropletRain;
  cfg.res = VecI<2>{32, 32};
  cfg.h = 0.005;
  cfg.rand.droplet_radius = 0.01;
  cfg.rand.position_min = cfg.rand.position_max = Vec<2>{0.0, 0.0};  // in the wall
  CHECK_THROWS_AS(randomizeScene(cfg, 1), std::runtime_error);
}

TEST_CASE("dataset files round-trip losslessly") {
  Rng rng(123);
  Dataset d;
  d.dim = 2;
  d.scale_feature = true;
  d.feature_len = 28;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x(28);
    for (auto& v : x) v = rng.uniform(-2, 2);
    std::vector<double> dv{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const bool label = rng.uniform() < 0.4;
    if (!label) dv = {0.0, 0.0};
    d.append(x, label, dv, 0.01);
  }
  const std::string path = tempPath("mlsplash_test_dataset.bin");
  writeDataset(d, path);
  const Dataset r = readDataset(path);
  CHECK(r.dim == d.dim);
  CHECK(r.scale_feature == d.scale_feature);
  CHECK(r.feature_len == d.feature_len);
  CHECK(r.features == d.features);
  CHECK(r.labels == d.labels);
  CHECK(r.dv == d.dv);
  CHECK(r.h_meta == d.h_meta);
  std::remove(path.c_str());
}

TEST_CASE("dataset reader reports version mismatches") {
  Dataset d;
  d.dim = 2;
  d.feature_len = 1;
  d.append({0.5}, false, {0.0, 0.0}, 0.01);
  const std::string path = tempPath("mlsplash_test_dataset_v.bin");
  writeDataset(d, path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(9);
    const std::uint32_t bad = 77;
    f.write(reinterpret_cast<const char*>(&bad), 4);
  }
  CHECK_THROWS_WITH(readDataset(path),
                    Catch::Matchers::ContainsSubstring("77") &&
                        Catch::Matchers::ContainsSubstring("1"));
  std::remove(path.c_str());
}

TEST_CASE("balancing equalizes class counts") {
  Rng rng(5);
  Dataset d;
  d.dim = 2;
  d.feature_len = 3;
  for (int i = 0; i < 100; ++i)
    d.append({1.0 * i, 0.0, 0.0}, i % 10 == 0, {0.0, 0.0}, 0.01);
  d.balance(rng);
  CHECK(d.positives() == 10);
  CHECK(d.size() == 20);
}

TEST_CASE("merge keeps identity and guards incompatible metadata") {
  Rng rng(6);
  Dataset a;
  a.dim = 2;
  a.feature_len = 3;
  for (int i = 0; i < 10; ++i) a.append({1.0 * i, 0, 0}, i % 2 == 0, {0.0, 0.0}, 0.01);
  Dataset empty;
  empty.dim = 2;
  empty.feature_len = 3;
  const Dataset m = mergeDatasets({a, empty}, rng);
  CHECK(m.features == a.features);
  CHECK(m.labels == a.labels);

  Dataset d3;
  d3.dim = 3;
  d3.feature_len = 3;
  CHECK_THROWS_AS(mergeDatasets({a, d3}, rng), std::invalid_argument);

  // mixed spacings demand the scale feature
  Dataset b = a;
  for (auto& h : b.h_meta) h = 0.02f;
  CHECK_THROWS_AS(mergeDatasets({a, b}, rng), std::invalid_argument);

  Dataset as = a, bs = b, cs = a;
  as.scale_feature = bs.scale_feature = cs.scale_feature = true;
  for (auto& h : cs.h_meta) h = 0.04f;
  const Dataset ms = mergeDatasets({as, bs, cs}, rng);
  std::set<float> hs(ms.h_meta.begin(), ms.h_meta.end());
  CHECK(hs.size() == 3);
}

TEST_CASE("a still pool produces no positive samples and errors") {
  SceneConfig<2> cfg;
  cfg.kind = SceneKind::Pool;
  cfg.res = VecI<2>{32, 32};
  cfg.h = 0.01;
  cfg.params.gravity = Vec<2>{0.0, -9.81};
  cfg.params.frame_dt = 0.01;
  cfg.rand.pool_depth = 0.1;
  cfg.duration = 0.05;
  cfg.coarse_factor = 2;
  DatagenOptions opt;
  opt.n_scenes = 1;
  CHECK_THROWS_AS(generateDataset(cfg, opt), std::runtime_error);
}

TEST_CASE("droplet-rain data generation yields a balanced dataset") {
  SceneConfig<2> cfg;
  cfg.kind = SceneKind::DropletRain;
  cfg.res = VecI<2>{64, 64};
  cfg.h = 0.005;
  cfg.params.sigma = 0.073;
  cfg.params.gravity = Vec<2>{0.0, -9.81};
  cfg.params.frame_dt = 0.04;
  cfg.params.particles_per_cell = 4;
  cfg.rand.pool_depth = 0.05;
  cfg.rand.droplet_count_min = 3;
  cfg.rand.droplet_count_max = 5;
  cfg.rand.droplet_radius = 0.016;
  cfg.rand.position_min = Vec<2>{0.05, 0.15};
  cfg.rand.position_max = Vec<2>{0.27, 0.28};
  cfg.rand.velocity_min = Vec<2>{-0.8, -2.5};
  cfg.rand.velocity_max = Vec<2>{0.8, -1.0};
  cfg.duration = 0.4;
  cfg.coarse_factor = 4;
  cfg.seed = 11;
  DatagenOptions opt;
  opt.n_scenes = 2;
  std::vector<std::string> skipped;
  const Dataset d = generateDataset(cfg, opt, &skipped);
  CHECK(skipped.empty());
  CHECK(d.size() > 0);
  CHECK(d.positives() * 2 == d.size());
  CHECK(d.feature_len == 27);
  for (float h : d.h_meta) CHECK(h == Catch::Approx(0.02));
}
