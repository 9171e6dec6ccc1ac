/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Training dataset container and its versioned binary file format
 *
 ******************************************************************************/

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlsplash/core/rng.hpp"

namespace mlsplash {

//! binary container, little-endian:
//!   magic "MLSPLASH1", u32 version=1, u8 D, u8 scale_flag, u32 feature_len,
//!   u64 n_samples, u64 n_positive,
//!   per sample: feature_len x f32, u8 label, D x f32 dv, f32 h_meta
inline constexpr char kDatasetMagic[9] = {'M', 'L', 'S', 'P', 'L', 'A', 'S', 'H', '1'};
inline constexpr std::uint32_t kDatasetVersion = 1;

struct Dataset {
  int dim = 2;
  bool scale_feature = false;
  std::uint32_t feature_len = 0;
  std::vector<float> features;   // n * feature_len
  std::vector<std::uint8_t> labels;
  std::vector<float> dv;         // n * dim, zero for negative samples
  std::vector<float> h_meta;     // n
  std::vector<std::string> provenance;  // not serialized; recorded in manifests

  std::size_t size() const { return labels.size(); }

  std::size_t positives() const {
    std::size_t n = 0;
    for (auto l : labels) n += l;
    return n;
  }

  void append(const std::vector<double>& x, bool label, const std::vector<double>& dvi,
              double h) {
    if (x.size() != feature_len) throw std::invalid_argument("Dataset: feature length mismatch");
    if (dvi.size() != static_cast<std::size_t>(dim))
      throw std::invalid_argument("Dataset: dv length mismatch");
    for (double v : x) features.push_back(static_cast<float>(v));
    labels.push_back(label ? 1 : 0);
    for (double v : dvi) dv.push_back(static_cast<float>(v));
    h_meta.push_back(static_cast<float>(h));
  }

  //! keep only the listed sample indices (ascending), in order
  void keep(const std::vector<std::size_t>& idx) {
    Dataset out;
    out.dim = dim;
    out.scale_feature = scale_feature;
    out.feature_len = feature_len;
    out.provenance = provenance;
    for (std::size_t i : idx) {
      for (std::uint32_t k = 0; k < feature_len; ++k)
        out.features.push_back(features[i * feature_len + k]);
      out.labels.push_back(labels[i]);
      for (int k = 0; k < dim; ++k)
        out.dv.push_back(dv[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)]);
      out.h_meta.push_back(h_meta[i]);
    }
    *this = std::move(out);
  }

  //! equalize class counts by random undersampling of the majority class;
  //! retained samples keep their original relative order
  void balance(Rng& rng) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < size(); ++i) (labels[i] ? pos : neg).push_back(i);
    const std::size_t m = std::min(pos.size(), neg.size());
    auto subsample = [&](std::vector<std::size_t>& v) {
      for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniformInt(0, static_cast<std::int64_t>(i) - 1));
        std::swap(v[i - 1], v[j]);
      }
      v.resize(m);
    };
    subsample(pos);
    subsample(neg);
    std::vector<std::size_t> retained;
    retained.reserve(2 * m);
    retained.insert(retained.end(), pos.begin(), pos.end());
    retained.insert(retained.end(), neg.begin(), neg.end());
    std::sort(retained.begin(), retained.end());
    keep(retained);
  }
};

namespace detail {

template <class T>
inline void writeLE(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
inline T readLE(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("unexpected end of file");
  return v;
}

}  // namespace detail

inline void writeDataset(const Dataset& d, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(kDatasetMagic, sizeof(kDatasetMagic));
  detail::writeLE<std::uint32_t>(os, kDatasetVersion);
  detail::writeLE<std::uint8_t>(os, static_cast<std::uint8_t>(d.dim));
  detail::writeLE<std::uint8_t>(os, d.scale_feature ? 1 : 0);
  detail::writeLE<std::uint32_t>(os, d.feature_len);
  detail::writeLE<std::uint64_t>(os, d.size());
  detail::writeLE<std::uint64_t>(os, d.positives());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::uint32_t k = 0; k < d.feature_len; ++k)
      detail::writeLE<float>(os, d.features[i * d.feature_len + k]);
    detail::writeLE<std::uint8_t>(os, d.labels[i]);
    for (int k = 0; k < d.dim; ++k)
      detail::writeLE<float>(os, d.dv[i * static_cast<std::size_t>(d.dim) + static_cast<std::size_t>(k)]);
    detail::writeLE<float>(os, d.h_meta[i]);
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline Dataset readDataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[9];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kDatasetMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a dataset file: " + path);
  const auto version = detail::readLE<std::uint32_t>(is);
  if (version != kDatasetVersion)
    throw std::runtime_error("dataset version mismatch in " + path + ": found " +
                             std::to_string(version) + ", expected " +
                             std::to_string(kDatasetVersion));
  Dataset d;
  d.dim = detail::readLE<std::uint8_t>(is);
  d.scale_feature = detail::readLE<std::uint8_t>(is) != 0;
  d.feature_len = detail::readLE<std::uint32_t>(is);
  const auto n = detail::readLE<std::uint64_t>(is);
  const auto npos = detail::readLE<std::uint64_t>(is);
  d.features.reserve(n * d.feature_len);
  d.labels.reserve(n);
  d.dv.reserve(n * static_cast<std::size_t>(d.dim));
  d.h_meta.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint32_t k = 0; k < d.feature_len; ++k)
      d.features.push_back(detail::readLE<float>(is));
    d.labels.push_back(detail::readLE<std::uint8_t>(is));
    for (int k = 0; k < d.dim; ++k) d.dv.push_back(detail::readLE<float>(is));
    d.h_meta.push_back(detail::readLE<float>(is));
  }
  if (d.positives() != npos)
    throw std::runtime_error("dataset class counts inconsistent in " + path);
  return d;
}

//! concatenate datasets with identical geometry metadata and re-balance.
//! Mixing grid spacings requires the scale feature.
inline Dataset mergeDatasets(const std::vector<Dataset>& parts, Rng& rng) {
  if (parts.empty()) throw std::invalid_argument("mergeDatasets: nothing to merge");
  Dataset out;
  out.dim = parts[0].dim;
  out.scale_feature = parts[0].scale_feature;
  out.feature_len = parts[0].feature_len;
  for (const Dataset& p : parts) {
    if (p.dim != out.dim || p.scale_feature != out.scale_feature ||
        p.feature_len != out.feature_len)
      throw std::invalid_argument("mergeDatasets: incompatible metadata");
    out.features.insert(out.features.end(), p.features.begin(), p.features.end());
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    out.dv.insert(out.dv.end(), p.dv.begin(), p.dv.end());
    out.h_meta.insert(out.h_meta.end(), p.h_meta.begin(), p.h_meta.end());
    out.provenance.insert(out.provenance.end(), p.provenance.begin(), p.provenance.end());
  }
  if (!out.scale_feature) {
    for (float h : out.h_meta)
      if (h != out.h_meta[0])
        throw std::invalid_argument(
            "mergeDatasets: mixed grid spacings need the scale feature enabled");
  }
  out.balance(rng);
  return out;
}

}  // namespace mlsplash
