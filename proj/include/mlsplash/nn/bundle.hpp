/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Trained model bundle: classifier, mean and variance networks, feature
 * normalization statistics, and the versioned model file format
 *
 ******************************************************************************/

#pragma once

#include <array>
#include <span>
#include <string>

#include "mlsplash/data/dataset.hpp"
#include "mlsplash/nn/mlp.hpp"

namespace mlsplash {

inline constexpr char kModelMagic[9] = {'M', 'L', 'S', 'P', 'L', 'M', 'D', 'L', '1'};
inline constexpr std::uint32_t kModelVersion = 1;

struct Normalization {
  std::vector<double> mean, stddev;

  void apply(std::span<const double> x, std::vector<double>& out) const {
    out.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / stddev[i];
  }
};

struct ModelBundle {
  int dim = 2;
  bool scale_feature = false;
  int feature_len = 0;
  Mlp classifier;   // 2 outputs: (splash, non-splash) logits
  Mlp mean_net;     // D outputs: mu, m/s
  Mlp var_net;      // D outputs: s = ln sigma^2
  Normalization norm;
  std::string provenance;

  //! splash/non-splash probabilities; the input is raw (un-normalized)
  std::array<double, 2> classify(std::span<const double> x) const {
    checkInput(x);
    std::vector<double> z;
    norm.apply(x, scratch_);
    classifier.infer(scratch_.data(), 1, z);
    std::array<double, 2> p;
    softmax2(z.data(), p.data());
    return p;
  }

  //! heteroscedastic velocity modification: componentwise mean and variance
  void modify(std::span<const double> x, std::vector<double>& mu,
              std::vector<double>& sigma2) const {
    checkInput(x);
    norm.apply(x, scratch_);
    mean_net.infer(scratch_.data(), 1, mu);
    var_net.infer(scratch_.data(), 1, sigma2);
    for (double& v : sigma2) v = std::exp(v);
  }

 private:
  void checkInput(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != feature_len)
      throw std::invalid_argument("ModelBundle: feature length mismatch: got " +
                                  std::to_string(x.size()) + ", expected " +
                                  std::to_string(feature_len));
  }
  mutable std::vector<double> scratch_;
};

namespace detail {

inline void writeVec(std::ostream& os, const std::vector<double>& v) {
  for (double x : v) writeLE<double>(os, x);
}

inline void readVec(std::istream& is, std::vector<double>& v, std::size_t n) {
  v.resize(n);
  for (double& x : v) x = readLE<double>(is);
}

inline void writeNet(std::ostream& os, const Mlp& net) {
  writeLE<std::uint32_t>(os, static_cast<std::uint32_t>(net.in));
  writeLE<std::uint32_t>(os, static_cast<std::uint32_t>(net.hidden));
  writeLE<std::uint32_t>(os, static_cast<std::uint32_t>(net.out));
  writeVec(os, net.w1);
  writeVec(os, net.b1);
  writeVec(os, net.gamma);
  writeVec(os, net.beta);
  writeVec(os, net.run_mean);
  writeVec(os, net.run_var);
  writeVec(os, net.w2);
  writeVec(os, net.b2);
}

inline Mlp readNet(std::istream& is) {
  Mlp net;
  net.in = static_cast<int>(readLE<std::uint32_t>(is));
  net.hidden = static_cast<int>(readLE<std::uint32_t>(is));
  net.out = static_cast<int>(readLE<std::uint32_t>(is));
  const auto H = static_cast<std::size_t>(net.hidden);
  readVec(is, net.w1, H * static_cast<std::size_t>(net.in));
  readVec(is, net.b1, H);
  readVec(is, net.gamma, H);
  readVec(is, net.beta, H);
  readVec(is, net.run_mean, H);
  readVec(is, net.run_var, H);
  readVec(is, net.w2, static_cast<std::size_t>(net.out) * H);
  readVec(is, net.b2, static_cast<std::size_t>(net.out));
  return net;
}

}  // namespace detail

inline void writeModel(const ModelBundle& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(kModelMagic, sizeof(kModelMagic));
  detail::writeLE<std::uint32_t>(os, kModelVersion);
  detail::writeLE<std::uint8_t>(os, static_cast<std::uint8_t>(m.dim));
  detail::writeLE<std::uint8_t>(os, m.scale_feature ? 1 : 0);
  detail::writeLE<std::uint32_t>(os, static_cast<std::uint32_t>(m.feature_len));
  detail::writeNet(os, m.classifier);
  detail::writeNet(os, m.mean_net);
  detail::writeNet(os, m.var_net);
  detail::writeVec(os, m.norm.mean);
  detail::writeVec(os, m.norm.stddev);
  detail::writeLE<std::uint32_t>(os, static_cast<std::uint32_t>(m.provenance.size()));
  os.write(m.provenance.data(), static_cast<std::streamsize>(m.provenance.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline ModelBundle readModel(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[9];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a model file: " + path);
  const auto version = detail::readLE<std::uint32_t>(is);
  if (version != kModelVersion)
    throw std::runtime_error("model version mismatch in " + path + ": found " +
                             std::to_string(version) + ", expected " +
                             std::to_string(kModelVersion));
  ModelBundle m;
  m.dim = detail::readLE<std::uint8_t>(is);
  m.scale_feature = detail::readLE<std::uint8_t>(is) != 0;
  m.feature_len = static_cast<int>(detail::readLE<std::uint32_t>(is));
  m.classifier = detail::readNet(is);
  m.mean_net = detail::readNet(is);
  m.var_net = detail::readNet(is);
  detail::readVec(is, m.norm.mean, static_cast<std::size_t>(m.feature_len));
  detail::readVec(is, m.norm.stddev, static_cast<std::size_t>(m.feature_len));
  const auto plen = detail::readLE<std::uint32_t>(is);
  m.provenance.resize(plen);
  is.read(m.provenance.data(), plen);
  if (!is) throw std::runtime_error("unexpected end of file: " + path);
  return m;
}

}  // namespace mlsplash
