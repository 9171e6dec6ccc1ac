/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Two-phase training of the classifier and the mean/variance modifier:
 * the first phase keeps the variance frozen, the second trains all three
 *
 ******************************************************************************/

#pragma once

#include <algorithm>
#include <string>

#include "mlsplash/nn/adam.hpp"
#include "mlsplash/nn/bundle.hpp"
#include "mlsplash/nn/loss.hpp"

namespace mlsplash {

struct TrainConfig {
  std::uint64_t iterations = 60000;
  int batch = 5000;                 // clamped to the available samples
  double learning_rate = 1e-4;
  double weight_decay = 1e-1;
  double dropout = 1e-1;
  double phase1_fraction = 0.5;     // fraction of iterations with frozen variance
  std::uint64_t seed = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double bn_momentum = 0.99;
  std::uint64_t curve_stride = 0;   // 0 picks iterations/200
  std::size_t eval_cap = 10000;     // samples per curve evaluation
};

struct CurvePoint {
  std::uint64_t iteration;
  double train_acc, test_acc, train_lm, test_lm;
};

struct TrainResult {
  ModelBundle bundle;
  std::vector<CurvePoint> curves;
};

namespace detail {

//! epoch-reshuffled cursor over an index list
class BatchCursor {
 public:
  BatchCursor(std::vector<std::size_t> idx, Rng* rng) : idx_(std::move(idx)), rng_(rng) {
    reshuffle();
  }
  void fill(std::size_t batch, std::vector<std::size_t>& out) {
    out.clear();
    while (out.size() < batch) {
      if (pos_ == idx_.size()) {
        reshuffle();
        pos_ = 0;
      }
      out.push_back(idx_[pos_++]);
    }
  }

 private:
  void reshuffle() {
    for (std::size_t i = idx_.size(); i > 1; --i) {
      const std::size_t j =
          static_cast<std::size_t>(rng_->uniformInt(0, static_cast<std::int64_t>(i) - 1));
      std::swap(idx_[i - 1], idx_[j]);
    }
  }
  std::vector<std::size_t> idx_;
  Rng* rng_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline TrainResult train(const Dataset& data, const TrainConfig& cfg) {
  const std::size_t n = data.size();
  const std::size_t npos = data.positives();
  if (npos < 2 || n - npos < 2)
    throw std::invalid_argument("train: need at least two samples per class");
  if (npos * 2 != n) throw std::invalid_argument("train: dataset must be balanced");
  if (cfg.phase1_fraction <= 0.0 || cfg.phase1_fraction >= 1.0)
    throw std::invalid_argument("train: phase1_fraction must be in (0,1)");
  const int dim = data.dim;
  const int flen = static_cast<int>(data.feature_len);

  // 75/25 split by seeded shuffle
  Rng rng_split(Rng::mix(cfg.seed, 2));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng_split.uniformInt(0, static_cast<std::int64_t>(i) - 1));
    std::swap(order[i - 1], order[j]);
  }
  const std::size_t ntrain = std::max<std::size_t>(1, (n * 3) / 4);
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(ntrain));
  std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(ntrain), order.end());
  std::vector<std::size_t> train_pos, test_pos;
  for (std::size_t i : train_idx)
    if (data.labels[i]) train_pos.push_back(i);
  for (std::size_t i : test_idx)
    if (data.labels[i]) test_pos.push_back(i);
  if (train_pos.size() < 2) throw std::invalid_argument("train: too few positives in the split");

  // normalization statistics from the training features
  ModelBundle bundle;
  bundle.dim = dim;
  bundle.scale_feature = data.scale_feature;
  bundle.feature_len = flen;
  bundle.norm.mean.assign(static_cast<std::size_t>(flen), 0.0);
  bundle.norm.stddev.assign(static_cast<std::size_t>(flen), 0.0);
  for (std::size_t i : train_idx)
    for (int k = 0; k < flen; ++k)
      bundle.norm.mean[static_cast<std::size_t>(k)] +=
          data.features[i * static_cast<std::size_t>(flen) + static_cast<std::size_t>(k)];
  for (double& m : bundle.norm.mean) m /= static_cast<double>(train_idx.size());
  for (std::size_t i : train_idx)
    for (int k = 0; k < flen; ++k) {
      const double d =
          data.features[i * static_cast<std::size_t>(flen) + static_cast<std::size_t>(k)] -
          bundle.norm.mean[static_cast<std::size_t>(k)];
      bundle.norm.stddev[static_cast<std::size_t>(k)] += d * d;
    }
  for (double& s : bundle.norm.stddev)
    s = std::max(std::sqrt(s / static_cast<double>(train_idx.size())), 1e-8);

  Rng rng_init(Rng::mix(cfg.seed, 3));
  bundle.classifier = Mlp::make(flen, 2, rng_init);
  bundle.mean_net = Mlp::make(flen, dim, rng_init);
  bundle.var_net = Mlp::make(flen, dim, rng_init);
  bundle.classifier.bn_momentum = bundle.mean_net.bn_momentum = bundle.var_net.bn_momentum =
      cfg.bn_momentum;

  auto gather = [&](const std::vector<std::size_t>& idx, std::vector<double>& X,
                    std::vector<std::uint8_t>& L, std::vector<double>& T) {
    X.resize(idx.size() * static_cast<std::size_t>(flen));
    L.resize(idx.size());
    T.resize(idx.size() * static_cast<std::size_t>(dim));
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const std::size_t i = idx[r];
      for (int k = 0; k < flen; ++k) {
        const std::size_t kk = static_cast<std::size_t>(k);
        X[r * static_cast<std::size_t>(flen) + kk] =
            (data.features[i * static_cast<std::size_t>(flen) + kk] - bundle.norm.mean[kk]) /
            bundle.norm.stddev[kk];
      }
      L[r] = data.labels[i];
      for (int k = 0; k < dim; ++k)
        T[r * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)] =
            data.dv[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)];
    }
  };

  Adam opt_cls(bundle.classifier.paramCount());
  Adam opt_mean(bundle.mean_net.paramCount());
  Adam opt_var(bundle.var_net.paramCount());
  AdamConfig acfg;
  acfg.learning_rate = cfg.learning_rate;
  acfg.weight_decay = cfg.weight_decay;
  acfg.beta1 = cfg.beta1;
  acfg.beta2 = cfg.beta2;
  acfg.eps = cfg.eps;

  std::vector<double*> p_cls, p_mean, p_var;
  bundle.classifier.visitParams([&](double& w) { p_cls.push_back(&w); });
  bundle.mean_net.visitParams([&](double& w) { p_mean.push_back(&w); });
  bundle.var_net.visitParams([&](double& w) { p_var.push_back(&w); });
  const auto mask_cls = bundle.classifier.decayMask();
  const auto mask_mean = bundle.mean_net.decayMask();
  const auto mask_var = bundle.var_net.decayMask();

  Rng rng_cls_shuffle(Rng::mix(cfg.seed, 6));
  Rng rng_mod_shuffle(Rng::mix(cfg.seed, 7));
  Rng rng_dropout(Rng::mix(cfg.seed, 8));
  detail::BatchCursor cls_cursor(train_idx, &rng_cls_shuffle);
  detail::BatchCursor mod_cursor(train_pos, &rng_mod_shuffle);

  const std::size_t cls_batch = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch), train_idx.size());
  const std::size_t mod_batch = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch), train_pos.size());
  const std::uint64_t stride =
      cfg.curve_stride > 0 ? cfg.curve_stride : std::max<std::uint64_t>(1, cfg.iterations / 200);
  const std::uint64_t phase1_end =
      static_cast<std::uint64_t>(cfg.phase1_fraction * static_cast<double>(cfg.iterations));

  std::vector<std::size_t> batch_idx;
  std::vector<double> X, T, flat;
  std::vector<std::uint8_t> L;
  Mlp::Cache cache, cache_var;
  Mlp::Grads grads;
  std::vector<double> dlogits, dmu, ds;

  // fixed evaluation subsets for the learning curves
  auto capIdx = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::size_t> out(idx.begin(),
                                 idx.begin() + static_cast<std::ptrdiff_t>(std::min(idx.size(), cfg.eval_cap)));
    return out;
  };
  const auto eval_train = capIdx(train_idx);
  const auto eval_test = capIdx(test_idx);
  const auto eval_train_pos = capIdx(train_pos);
  const auto eval_test_pos = capIdx(test_pos);

  auto evaluate = [&](const std::vector<std::size_t>& idx, const std::vector<std::size_t>& pos,
                      double& acc, double& lm) {
    std::vector<double> Xe, Te, logits, mu, sv;
    std::vector<std::uint8_t> Le;
    gather(idx, Xe, Le, Te);
    bundle.classifier.infer(Xe.data(), static_cast<int>(idx.size()), logits);
    softmaxXentLoss(logits.data(), Le.data(), static_cast<int>(idx.size()), nullptr, &acc);
    gather(pos, Xe, Le, Te);
    bundle.mean_net.infer(Xe.data(), static_cast<int>(pos.size()), mu);
    bundle.var_net.infer(Xe.data(), static_cast<int>(pos.size()), sv);
    lm = mveLoss(mu.data(), sv.data(), Te.data(), static_cast<int>(pos.size()), dim, false,
                 nullptr, nullptr);
  };

  TrainResult result;
  for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
    const bool phase1 = it < phase1_end;

    // classifier step
    cls_cursor.fill(cls_batch, batch_idx);
    gather(batch_idx, X, L, T);
    bundle.classifier.forward(X.data(), static_cast<int>(cls_batch), cache, true, cfg.dropout,
                              &rng_dropout, true);
    dlogits.resize(cls_batch * 2);
    softmaxXentLoss(cache.y.data(), L.data(), static_cast<int>(cls_batch), dlogits.data());
    bundle.classifier.backward(cache, dlogits.data(), true, grads);
    bundle.classifier.collectGrads(grads, flat);
    opt_cls.step(p_cls, flat, acfg, mask_cls);

    // modifier step on positives
    mod_cursor.fill(mod_batch, batch_idx);
    gather(batch_idx, X, L, T);
    bundle.mean_net.forward(X.data(), static_cast<int>(mod_batch), cache, true, cfg.dropout,
                            &rng_dropout, true);
    dmu.resize(mod_batch * static_cast<std::size_t>(dim));
    if (phase1) {
      mveLoss(cache.y.data(), nullptr, T.data(), static_cast<int>(mod_batch), dim, true,
              dmu.data(), nullptr);
      bundle.mean_net.backward(cache, dmu.data(), true, grads);
      bundle.mean_net.collectGrads(grads, flat);
      opt_mean.step(p_mean, flat, acfg, mask_mean);
    } else {
      bundle.var_net.forward(X.data(), static_cast<int>(mod_batch), cache_var, true, cfg.dropout,
                             &rng_dropout, true);
      ds.resize(mod_batch * static_cast<std::size_t>(dim));
      mveLoss(cache.y.data(), cache_var.y.data(), T.data(), static_cast<int>(mod_batch), dim,
              false, dmu.data(), ds.data());
      bundle.mean_net.backward(cache, dmu.data(), true, grads);
      bundle.mean_net.collectGrads(grads, flat);
      opt_mean.step(p_mean, flat, acfg, mask_mean);
      bundle.var_net.backward(cache_var, ds.data(), true, grads);
      bundle.var_net.collectGrads(grads, flat);
      opt_var.step(p_var, flat, acfg, mask_var);
    }

    if (it % stride == 0 || it + 1 == cfg.iterations) {
      CurvePoint pt;
      pt.iteration = it;
      evaluate(eval_train, eval_train_pos, pt.train_acc, pt.train_lm);
      evaluate(eval_test, eval_test_pos, pt.test_acc, pt.test_lm);
      result.curves.push_back(pt);
    }
  }

  bundle.provenance = "trained iterations=" + std::to_string(cfg.iterations) +
                      " batch=" + std::to_string(cfg.batch) + " seed=" + std::to_string(cfg.seed);
  result.bundle = std::move(bundle);
  return result;
}

//! learning curves as CSV: iteration, train_acc, test_acc, train_Lm, test_Lm
inline void writeCurvesCsv(const std::vector<CurvePoint>& curves, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "iteration,train_acc,test_acc,train_Lm,test_Lm\n";
  for (const CurvePoint& p : curves)
    os << p.iteration << ',' << p.train_acc << ',' << p.test_acc << ',' << p.train_lm << ','
       << p.test_lm << '\n';
}

}  // namespace mlsplash
