/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Tests for the network engine: forward passes, losses, gradients, training
 *
 ******************************************************************************/

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>

#include "mlsplash/nn/gradcheck.hpp"
#include "mlsplash/nn/train.hpp"

using namespace mlsplash;

namespace {

Mlp zeroNet(int in, int out) {
  Rng rng(1);
  Mlp net = Mlp::make(in, out, rng);
  for (double& w : net.w1) w = 0.0;
  for (double& w : net.w2) w = 0.0;
  return net;
}

ModelBundle zeroBundle(int flen, int dim) {
  ModelBundle b;
  b.dim = dim;
  b.feature_len = flen;
  b.classifier = zeroNet(flen, 2);
  b.mean_net = zeroNet(flen, dim);
  b.var_net = zeroNet(flen, dim);
  b.norm.mean.assign(static_cast<std::size_t>(flen), 0.0);
  b.norm.stddev.assign(static_cast<std::size_t>(flen), 1.0);
  return b;
}

//! synthetic heteroscedastic dataset: dv_j ~ N(a_j u, (b_j u)^2), features
//! (u, u^2); negatives carry zero targets so the set can be balanced
Dataset heteroscedasticData(std::size_t n_pos, Rng& rng) {
  Dataset d;
  d.dim = 2;
  d.feature_len = 2;
  const double a[2] = {1.2, -0.7};
  const double b[2] = {0.4, 0.25};
  for (std::size_t i = 0; i < n_pos; ++i) {
    const double u = rng.uniform(0.5, 1.5);
    std::vector<double> dv(2);
    for (int j = 0; j < 2; ++j) dv[static_cast<std::size_t>(j)] = rng.normal(a[j] * u, b[j] * u);
    d.append({u, u * u}, true, dv, 0.01);
    const double un = rng.uniform(0.5, 1.5);
    d.append({un, un * un}, false, {0.0, 0.0}, 0.01);
  }
  return d;
}

}  // namespace

TEST_CASE("zero-weight classifier returns the uninformed distribution") {
  const auto b = zeroBundle(4, 2);
  const std::vector<double> x{0.3, -0.2, 0.9, 0.1};
  const auto p = b.classify(x);
  CHECK(p[0] == Catch::Approx(0.5).margin(1e-15));
  CHECK(p[1] == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("classifier probabilities always sum to one") {
  Rng rng(7);
  ModelBundle b = zeroBundle(6, 2);
  b.classifier = Mlp::make(6, 2, rng);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> x(6);
    for (auto& v : x) v = rng.uniform(-3, 3);
    const auto p = b.classify(x);
    CHECK(p[0] + p[1] == Catch::Approx(1.0).margin(1e-12));
    CHECK(p[0] > 0.0);
  }
}

TEST_CASE("classifier rejects mismatched feature lengths") {
  const auto b = zeroBundle(4, 2);
  const std::vector<double> x{0.1, 0.2};
  CHECK_THROWS_AS(b.classify(x), std::invalid_argument);
}

TEST_CASE("hand-set micro network matches the hand-computed chain") {
  ModelBundle b = zeroBundle(1, 2);
  Mlp& net = b.classifier;
  // 1 input -> hidden 2 -> 2 outputs, every parameter hand-picked
  net.w1 = {0.7, -1.1};
  net.b1 = {0.2, 0.05};
  net.gamma = {1.3, 0.8};
  net.beta = {-0.1, 0.3};
  net.run_mean = {0.15, -0.2};
  net.run_var = {1.4, 0.9};
  net.w2 = {0.5, -0.4, 0.9, 0.2};
  net.b2 = {0.01, -0.03};
  const double x = 0.42;

  auto hidden = [&](int j) {
    const double z = net.w1[static_cast<std::size_t>(j)] * x + net.b1[static_cast<std::size_t>(j)];
    const double xh = (z - net.run_mean[static_cast<std::size_t>(j)]) /
                      std::sqrt(net.run_var[static_cast<std::size_t>(j)] + net.bn_eps);
    return std::tanh(net.gamma[static_cast<std::size_t>(j)] * xh +
                     net.beta[static_cast<std::size_t>(j)]);
  };
  const double t0 = hidden(0), t1 = hidden(1);
  const double z0 = net.w2[0] * t0 + net.w2[1] * t1 + net.b2[0];
  const double z1 = net.w2[2] * t0 + net.w2[3] * t1 + net.b2[1];
  const double e0 = std::exp(z0), e1 = std::exp(z1);

  const auto p = b.classify(std::vector<double>{x});
  CHECK(p[0] == Catch::Approx(e0 / (e0 + e1)).epsilon(1e-12));
  CHECK(p[1] == Catch::Approx(e1 / (e0 + e1)).epsilon(1e-12));
}

TEST_CASE("zero-weight modifier returns unit variance and zero mean") {
  const auto b = zeroBundle(4, 2);
  std::vector<double> mu, s2;
  b.modify(std::vector<double>{0.5, -0.5, 1.0, 2.0}, mu, s2);
  CHECK(mu == std::vector<double>{0.0, 0.0});
  CHECK(s2 == std::vector<double>{1.0, 1.0});
}

TEST_CASE("predicted variance is strictly positive on random inputs") {
  Rng rng(9);
  ModelBundle b = zeroBundle(3, 2);
  b.var_net = Mlp::make(3, 2, rng);
  std::vector<double> mu, s2;
  for (int k = 0; k < 100000; ++k) {
    const std::vector<double> x{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    b.modify(x, mu, s2);
    if (!(s2[0] > 0.0 && s2[1] > 0.0)) {
      FAIL("non-positive variance");
    }
  }
  SUCCEED();
}

TEST_CASE("classification loss reference values") {
  // perfectly confident prediction
  {
    const double logits[2] = {50.0, -50.0};
    const std::uint8_t label = 1;
    CHECK(softmaxXentLoss(logits, &label, 1, nullptr) == Catch::Approx(0.0).margin(1e-12));
  }
  // uninformed predictor gives ln 2
  {
    const double logits[2] = {0.0, 0.0};
    const std::uint8_t label = 0;
    CHECK(softmaxXentLoss(logits, &label, 1, nullptr) == Catch::Approx(std::log(2.0)));
  }
  // batch of two with true-class probabilities 0.5 and 0.25
  {
    const double logits[4] = {0.0, 0.0, 0.0, std::log(3.0)};
    const std::uint8_t labels[2] = {0, 1};
    const double want = (std::log(2.0) + std::log(4.0)) / 2.0;
    CHECK(softmaxXentLoss(logits, labels, 2, nullptr) == Catch::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("MVE loss reference values") {
  const double dv[1] = {1.0};
  {
    const double mu[1] = {1.0};
    const double s[1] = {0.0};
    CHECK(mveLoss(mu, s, dv, 1, 1, false, nullptr, nullptr) == Catch::Approx(0.0).margin(1e-15));
  }
  {
    const double mu[1] = {0.0};
    const double s[1] = {0.0};
    CHECK(mveLoss(mu, s, dv, 1, 1, false, nullptr, nullptr) == Catch::Approx(0.5));
  }
  {
    const double mu[1] = {1.0};
    const double s[1] = {1.0};  // sigma^2 = e
    CHECK(mveLoss(mu, s, dv, 1, 1, false, nullptr, nullptr) == Catch::Approx(0.5));
  }
}

TEST_CASE("analytic gradients match finite differences for the softmax loss") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    Mlp net = Mlp::make(3, 2, rng);
    for (double& v : net.run_mean) v = rng.uniform(-0.3, 0.3);
    for (double& v : net.run_var) v = rng.uniform(0.5, 1.5);
    const int n = 5;
    std::vector<double> X(3 * n);
    for (auto& v : X) v = rng.uniform(-1, 1);
    std::vector<std::uint8_t> labels(n);
    for (auto& l : labels) l = rng.uniform() < 0.5;
    const double err = gradientCheck(net, X, n, [&](const double* y, int nn, double* dy) {
      return softmaxXentLoss(y, labels.data(), nn, dy);
    });
    CHECK(err < 1e-4);
  }
}

TEST_CASE("analytic gradients match finite differences for the MVE loss") {
  Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4, dim = 2;
    std::vector<double> X(3 * n), dv(static_cast<std::size_t>(n * dim));
    for (auto& v : X) v = rng.uniform(-1, 1);
    for (auto& v : dv) v = rng.uniform(-1, 1);

    // mean path: variance fixed at the current var-net prediction
    Mlp mean_net = Mlp::make(3, dim, rng);
    Mlp var_net = Mlp::make(3, dim, rng);
    std::vector<double> s_fixed;
    var_net.infer(X.data(), n, s_fixed);
    std::vector<double> scratch(static_cast<std::size_t>(n * dim));
    const double err_mu = gradientCheck(mean_net, X, n, [&](const double* y, int nn, double* dy) {
      return mveLoss(y, s_fixed.data(), dv.data(), nn, dim, false, dy, scratch.data());
    });
    CHECK(err_mu < 1e-4);

    // variance path: mean fixed
    std::vector<double> mu_fixed;
    mean_net.infer(X.data(), n, mu_fixed);
    const double err_s = gradientCheck(var_net, X, n, [&](const double* y, int nn, double* dy) {
      return mveLoss(mu_fixed.data(), y, dv.data(), nn, dim, false, scratch.data(), dy);
    });
    CHECK(err_s < 1e-4);
  }
}

TEST_CASE("gradient vanishes at the optimum of a quadratic in the output") {
  Mlp net = zeroNet(2, 1);
  net.b2 = {0.7};
  const std::vector<double> X{0.3, -0.4};
  Mlp::Cache cache;
  Mlp::Grads grads;
  net.forward(X.data(), 1, cache, false, 0.0, nullptr, false);
  std::vector<double> dy(1);
  // L = (y - 0.7)^2 has its optimum exactly at the current output
  dy[0] = 2.0 * (cache.y[0] - 0.7);
  net.backward(cache, dy.data(), false, grads);
  std::vector<double> flat;
  net.collectGrads(grads, flat);
  double worst = 0.0;
  for (double g : flat) worst = std::max(worst, std::abs(g));
  CHECK(worst <= 1e-8);
}

TEST_CASE("training separates a linearly separable synthetic set") {
  Rng rng(31);
  Dataset d;
  d.dim = 2;
  d.feature_len = 2;
  for (int i = 0; i < 4000; ++i) {
    double x0 = rng.uniform(-1, 1), x1 = rng.uniform(-1, 1);
    while (std::abs(x0 + x1) < 0.2) {
      x0 = rng.uniform(-1, 1);
      x1 = rng.uniform(-1, 1);
    }
    const bool label = x0 + x1 > 0;
    d.append({x0, x1}, label, {0.0, 0.0}, 0.01);
  }
  // make it exactly balanced
  Rng rb(1);
  d.balance(rb);
  TrainConfig cfg;
  cfg.iterations = 5000;
  cfg.batch = 256;
  cfg.seed = 4;
  const auto result = train(d, cfg);
  REQUIRE(!result.curves.empty());
  CHECK(result.curves.back().test_acc >= 0.98);
}

TEST_CASE("training recovers a known heteroscedastic variance") {
  Rng rng(33);
  Dataset d = heteroscedasticData(20000, rng);
  TrainConfig cfg;
  cfg.iterations = 40000;
  cfg.batch = 512;
  cfg.seed = 5;
  const auto result = train(d, cfg);
  const ModelBundle& b = result.bundle;

  const double bj[2] = {0.4, 0.25};
  std::vector<double> mu, s2;
  for (double u = 0.6; u <= 1.4; u += 0.05) {
    b.modify(std::vector<double>{u, u * u}, mu, s2);
    for (int j = 0; j < 2; ++j) {
      const double want = bj[j] * u * bj[j] * u;
      CAPTURE(u, j, s2[static_cast<std::size_t>(j)], want);
      CHECK(s2[static_cast<std::size_t>(j)] == Catch::Approx(want).epsilon(0.20));
    }
  }

  // the two-phase schedule: the full loss drops below the phase-1 plateau
  double plateau = 0.0;
  int plateau_count = 0;
  for (const auto& p : result.curves) {
    if (p.iteration >= cfg.iterations * 2 / 5 && p.iteration < cfg.iterations / 2) {
      plateau += p.test_lm;
      ++plateau_count;
    }
  }
  REQUIRE(plateau_count > 0);
  plateau /= plateau_count;
  CHECK(result.curves.back().test_lm < plateau);
}

TEST_CASE("training is bit-reproducible for a fixed seed") {
  Rng rng(35);
  Dataset d = heteroscedasticData(500, rng);
  TrainConfig cfg;
  cfg.iterations = 300;
  cfg.batch = 64;
  cfg.seed = 9;
  auto r1 = train(d, cfg);
  auto r2 = train(d, cfg);
  CHECK(r1.bundle.classifier.w1 == r2.bundle.classifier.w1);
  CHECK(r1.bundle.mean_net.w2 == r2.bundle.mean_net.w2);
  CHECK(r1.bundle.var_net.w1 == r2.bundle.var_net.w1);
  CHECK(r1.bundle.classifier.run_mean == r2.bundle.classifier.run_mean);
  REQUIRE(r1.curves.size() == r2.curves.size());
  for (std::size_t i = 0; i < r1.curves.size(); ++i) {
    CHECK(r1.curves[i].train_acc == r2.curves[i].train_acc);
    CHECK(r1.curves[i].test_lm == r2.curves[i].test_lm);
  }
}

TEST_CASE("training rejects degenerate datasets") {
  Dataset d;
  d.dim = 2;
  d.feature_len = 2;
  d.append({0.1, 0.2}, true, {0.0, 0.0}, 0.01);
  d.append({0.2, 0.1}, false, {0.0, 0.0}, 0.01);
  TrainConfig cfg;
  CHECK_THROWS_AS(train(d, cfg), std::invalid_argument);
}

TEST_CASE("model files round-trip and report version mismatches") {
  Rng rng(41);
  ModelBundle b = zeroBundle(5, 2);
  b.classifier = Mlp::make(5, 2, rng);
  b.mean_net = Mlp::make(5, 2, rng);
  b.var_net = Mlp::make(5, 2, rng);
  for (auto& v : b.norm.mean) v = rng.uniform(-1, 1);
  for (auto& v : b.norm.stddev) v = rng.uniform(0.5, 2.0);
  b.provenance = "unit test";
  const std::string path =
      (std::filesystem::temp_directory_path() / "mlsplash_test_model.bin").string();
  writeModel(b, path);
  const ModelBundle r = readModel(path);
  CHECK(r.dim == b.dim);
  CHECK(r.feature_len == b.feature_len);
  CHECK(r.classifier.w1 == b.classifier.w1);
  CHECK(r.classifier.run_var == b.classifier.run_var);
  CHECK(r.mean_net.w2 == b.mean_net.w2);
  CHECK(r.var_net.b2 == b.var_net.b2);
  CHECK(r.norm.mean == b.norm.mean);
  CHECK(r.norm.stddev == b.norm.stddev);
  CHECK(r.provenance == b.provenance);

  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(9);
    const std::uint32_t bad = 9;
    f.write(reinterpret_cast<const char*>(&bad), 4);
  }
  CHECK_THROWS_WITH(readModel(path), Catch::Matchers::ContainsSubstring("version mismatch"));
  std::remove(path.c_str());
}
