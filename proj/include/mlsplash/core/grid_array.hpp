/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Dense D-dimensional array with x-fastest linear storage
 *
 ******************************************************************************/

#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mlsplash/core/vec.hpp"

namespace mlsplash {

template <int D, class T>
class GridArray {
 public:
  GridArray() { n_.v.fill(0); }
  explicit GridArray(VecI<D> n, T init = T{}) : n_(n) {
    std::size_t total = 1;
    for (int a = 0; a < D; ++a) {
      if (n[a] < 0) throw std::invalid_argument("GridArray: negative size");
      total *= static_cast<std::size_t>(n[a]);
    }
    v_.assign(total, init);
  }

  const VecI<D>& size() const { return n_; }
  int size(int axis) const { return n_[axis]; }
  std::size_t total() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  bool inBounds(const VecI<D>& c) const {
    for (int a = 0; a < D; ++a)
      if (c[a] < 0 || c[a] >= n_[a]) return false;
    return true;
  }

  std::size_t flatten(const VecI<D>& c) const {
    std::size_t idx = static_cast<std::size_t>(c[D - 1]);
    for (int a = D - 2; a >= 0; --a)
      idx = idx * static_cast<std::size_t>(n_[a]) + static_cast<std::size_t>(c[a]);
    return idx;
  }

  VecI<D> unflatten(std::size_t idx) const {
    VecI<D> c;
    for (int a = 0; a < D; ++a) {
      c[a] = static_cast<int>(idx % static_cast<std::size_t>(n_[a]));
      idx /= static_cast<std::size_t>(n_[a]);
    }
    return c;
  }

  T& at(const VecI<D>& c) { return v_[flatten(c)]; }
  const T& at(const VecI<D>& c) const { return v_[flatten(c)]; }

  //! clamped access, used by stencils that reach past the boundary
  const T& atClamped(VecI<D> c) const {
    for (int a = 0; a < D; ++a) c[a] = std::clamp(c[a], 0, n_[a] - 1);
    return at(c);
  }

  T& operator[](std::size_t i) { return v_[i]; }
  const T& operator[](std::size_t i) const { return v_[i]; }

  void fill(T value) { std::fill(v_.begin(), v_.end(), value); }

  std::vector<T>& data() { return v_; }
  const std::vector<T>& data() const { return v_; }

  friend bool operator==(const GridArray& a, const GridArray& b) {
    return a.n_ == b.n_ && a.v_ == b.v_;
  }

 private:
  VecI<D> n_;
  std::vector<T> v_;
};

}  // namespace mlsplash
