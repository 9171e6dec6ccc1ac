/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Small fixed-dimension vector used for positions, velocities and indices
 *
 ******************************************************************************/

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>

namespace mlsplash {

template <int D, class T = double>
struct VecT {
  static_assert(D == 2 || D == 3, "mlsplash supports 2D and 3D only");
  std::array<T, D> v{};

  VecT() = default;
  explicit VecT(T s) { v.fill(s); }
  VecT(T x, T y) : v{x, y} { static_assert(D == 2); }
  VecT(T x, T y, T z)
    requires(D == 3)
      : v{x, y, z} {}

  T& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  const T& operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

  VecT operator-() const {
    VecT r;
    for (int i = 0; i < D; ++i) r[i] = -v[static_cast<std::size_t>(i)];
    return r;
  }
  VecT& operator+=(const VecT& o) {
    for (int i = 0; i < D; ++i) (*this)[i] += o[i];
    return *this;
  }
  VecT& operator-=(const VecT& o) {
    for (int i = 0; i < D; ++i) (*this)[i] -= o[i];
    return *this;
  }
  VecT& operator*=(T s) {
    for (int i = 0; i < D; ++i) (*this)[i] *= s;
    return *this;
  }
  friend VecT operator+(VecT a, const VecT& b) { return a += b; }
  friend VecT operator-(VecT a, const VecT& b) { return a -= b; }
  friend VecT operator*(VecT a, T s) { return a *= s; }
  friend VecT operator*(T s, VecT a) { return a *= s; }
  friend VecT operator/(VecT a, T s) {
    for (int i = 0; i < D; ++i) a[i] /= s;
    return a;
  }
  friend bool operator==(const VecT& a, const VecT& b) { return a.v == b.v; }

  friend T dot(const VecT& a, const VecT& b) {
    T s{};
    for (int i = 0; i < D; ++i) s += a[i] * b[i];
    return s;
  }
  friend T norm2(const VecT& a) { return dot(a, a); }
  friend T norm(const VecT& a) { return std::sqrt(norm2(a)); }

  friend std::ostream& operator<<(std::ostream& os, const VecT& a) {
    os << "(";
    for (int i = 0; i < D; ++i) os << (i ? "," : "") << a[i];
    return os << ")";
  }
};

template <int D>
using Vec = VecT<D, double>;
template <int D>
using VecI = VecT<D, int>;

//! unit index offset along one axis
template <int D>
inline VecI<D> axisOffset(int axis, int step = 1) {
  VecI<D> e;
  e[axis] = step;
  return e;
}

template <int D>
inline Vec<D> toVec(const VecI<D>& c) {
  Vec<D> r;
  for (int i = 0; i < D; ++i) r[i] = static_cast<double>(c[i]);
  return r;
}

}  // namespace mlsplash
