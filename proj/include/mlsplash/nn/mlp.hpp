/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Two-layer perceptron with tanh hidden activation, batch normalization on
 * the hidden pre-activation, dropout, and hand-derived backpropagation.
 * The hidden width is always twice the input length.
 *
 ******************************************************************************/

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mlsplash/core/rng.hpp"

namespace mlsplash {

struct Mlp {
  int in = 0, hidden = 0, out = 0;
  std::vector<double> w1, b1;          // hidden x in, hidden
  std::vector<double> gamma, beta;     // batch-norm scale/shift
  std::vector<double> run_mean, run_var;
  std::vector<double> w2, b2;          // out x hidden, out
  double bn_eps = 1e-5;
  double bn_momentum = 0.99;

  static Mlp make(int input, int output, Rng& rng) {
    Mlp net;
    net.in = input;
    net.hidden = 2 * input;
    net.out = output;
    auto xavier = [&](std::vector<double>& w, int fan_in, int fan_out) {
      const double lim = std::sqrt(6.0 / (fan_in + fan_out));
      w.resize(static_cast<std::size_t>(fan_in) * static_cast<std::size_t>(fan_out));
      for (double& v : w) v = rng.uniform(-lim, lim);
    };
    xavier(net.w1, input, net.hidden);
    net.b1.assign(static_cast<std::size_t>(net.hidden), 0.0);
    net.gamma.assign(static_cast<std::size_t>(net.hidden), 1.0);
    net.beta.assign(static_cast<std::size_t>(net.hidden), 0.0);
    net.run_mean.assign(static_cast<std::size_t>(net.hidden), 0.0);
    net.run_var.assign(static_cast<std::size_t>(net.hidden), 1.0);
    xavier(net.w2, net.hidden, output);
    net.b2.assign(static_cast<std::size_t>(output), 0.0);
    return net;
  }

  struct Cache {
    int n = 0;
    std::vector<double> x;      // n x in
    std::vector<double> mean, istd;  // per hidden unit (batch or running)
    std::vector<double> xhat;   // n x hidden, normalized pre-activation
    std::vector<double> t;      // n x hidden, tanh output
    std::vector<double> mask;   // n x hidden, dropout factors
    std::vector<double> y;      // n x out
  };

  struct Grads {
    std::vector<double> w1, b1, gamma, beta, w2, b2;
    void reset(const Mlp& m) {
      w1.assign(m.w1.size(), 0.0);
      b1.assign(m.b1.size(), 0.0);
      gamma.assign(m.gamma.size(), 0.0);
      beta.assign(m.beta.size(), 0.0);
      w2.assign(m.w2.size(), 0.0);
      b2.assign(m.b2.size(), 0.0);
    }
  };

  //! forward pass over a row-major batch. batch_stats selects training-mode
  //! batch normalization (and updates running statistics); dropout > 0 draws
  //! an inverted-dropout mask from the rng.
  void forward(const double* X, int n, Cache& c, bool batch_stats, double dropout, Rng* rng,
               bool update_running) {
    const std::size_t H = static_cast<std::size_t>(hidden);
    const std::size_t I = static_cast<std::size_t>(in);
    const std::size_t O = static_cast<std::size_t>(out);
    const std::size_t N = static_cast<std::size_t>(n);
    c.n = n;
    c.x.assign(X, X + N * I);
    c.xhat.resize(N * H);
    c.t.resize(N * H);
    c.mask.assign(N * H, 1.0);
    c.y.resize(N * O);
    c.mean.resize(H);
    c.istd.resize(H);

    std::vector<double> z(N * H);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < H; ++j) {
        double s = b1[j];
        const double* wr = &w1[j * I];
        const double* xr = &c.x[i * I];
        for (std::size_t k = 0; k < I; ++k) s += wr[k] * xr[k];
        z[i * H + j] = s;
      }

    if (batch_stats) {
      for (std::size_t j = 0; j < H; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < N; ++i) m += z[i * H + j];
        m /= static_cast<double>(N);
        double v = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
          const double d = z[i * H + j] - m;
          v += d * d;
        }
        v /= static_cast<double>(N);
        c.mean[j] = m;
        c.istd[j] = 1.0 / std::sqrt(v + bn_eps);
        if (update_running) {
          run_mean[j] = bn_momentum * run_mean[j] + (1.0 - bn_momentum) * m;
          run_var[j] = bn_momentum * run_var[j] + (1.0 - bn_momentum) * v;
        }
      }
    } else {
      for (std::size_t j = 0; j < H; ++j) {
        c.mean[j] = run_mean[j];
        c.istd[j] = 1.0 / std::sqrt(run_var[j] + bn_eps);
      }
    }

    if (dropout > 0.0 && rng) {
      const double keep = 1.0 - dropout;
      for (std::size_t i = 0; i < N * H; ++i)
        c.mask[i] = rng->uniform() < keep ? 1.0 / keep : 0.0;
    }

    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < H; ++j) {
        const double xh = (z[i * H + j] - c.mean[j]) * c.istd[j];
        c.xhat[i * H + j] = xh;
        c.t[i * H + j] = std::tanh(gamma[j] * xh + beta[j]);
      }

    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t o = 0; o < O; ++o) {
        double s = b2[o];
        const double* wr = &w2[o * H];
        for (std::size_t j = 0; j < H; ++j) s += wr[j] * c.t[i * H + j] * c.mask[i * H + j];
        c.y[i * O + o] = s;
      }
  }

  //! inference-mode forward (running statistics, no dropout)
  void infer(const double* X, int n, std::vector<double>& y) const {
    Cache c;
    const_cast<Mlp*>(this)->forward(X, n, c, false, 0.0, nullptr, false);
    y = std::move(c.y);
  }

  //! backpropagate dY (n x out) through the cached forward pass.
  //! batch_stats must match the forward call.
  void backward(const Cache& c, const double* dY, bool batch_stats, Grads& g) const {
    const std::size_t H = static_cast<std::size_t>(hidden);
    const std::size_t I = static_cast<std::size_t>(in);
    const std::size_t O = static_cast<std::size_t>(out);
    const std::size_t N = static_cast<std::size_t>(c.n);
    g.reset(*this);

    // output layer
    std::vector<double> dh(N * H, 0.0);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t o = 0; o < O; ++o) {
        const double d = dY[i * O + o];
        g.b2[o] += d;
        const double* wr = &w2[o * H];
        for (std::size_t j = 0; j < H; ++j) {
          g.w2[o * H + j] += d * c.t[i * H + j] * c.mask[i * H + j];
          dh[i * H + j] += d * wr[j] * c.mask[i * H + j];
        }
      }

    // tanh and batch norm
    std::vector<double> dxhat(N * H);
    for (std::size_t i = 0; i < N * H; ++i) {
      const double dt = dh[i] * (1.0 - c.t[i] * c.t[i]);  // through tanh
      const std::size_t j = i % H;
      g.gamma[j] += dt * c.xhat[i];
      g.beta[j] += dt;
      dxhat[i] = dt * gamma[j];
    }

    std::vector<double> dz(N * H);
    if (batch_stats) {
      for (std::size_t j = 0; j < H; ++j) {
        double sum_dx = 0.0, sum_dx_xhat = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
          sum_dx += dxhat[i * H + j];
          sum_dx_xhat += dxhat[i * H + j] * c.xhat[i * H + j];
        }
        const double inv_n = 1.0 / static_cast<double>(N);
        for (std::size_t i = 0; i < N; ++i) {
          const double xh = c.xhat[i * H + j];
          dz[i * H + j] =
              c.istd[j] * (dxhat[i * H + j] - inv_n * sum_dx - xh * inv_n * sum_dx_xhat);
        }
      }
    } else {
      for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < H; ++j) dz[i * H + j] = dxhat[i * H + j] * c.istd[j];
    }

    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < H; ++j) {
        const double d = dz[i * H + j];
        g.b1[j] += d;
        const double* xr = &c.x[i * I];
        double* wr = &g.w1[j * I];
        for (std::size_t k = 0; k < I; ++k) wr[k] += d * xr[k];
      }
  }

  //! trainable parameters in declaration order
  template <class F>
  void visitParams(F&& f) {
    for (double& v : w1) f(v);
    for (double& v : b1) f(v);
    for (double& v : gamma) f(v);
    for (double& v : beta) f(v);
    for (double& v : w2) f(v);
    for (double& v : b2) f(v);
  }

  //! decay eligibility aligned with visitParams order: weight matrices only
  std::vector<std::uint8_t> decayMask() const {
    std::vector<std::uint8_t> mask;
    mask.reserve(paramCount());
    mask.insert(mask.end(), w1.size(), 1);
    mask.insert(mask.end(), b1.size() + gamma.size() + beta.size(), 0);
    mask.insert(mask.end(), w2.size(), 1);
    mask.insert(mask.end(), b2.size(), 0);
    return mask;
  }

  void collectGrads(const Grads& g, std::vector<double>& flat) const {
    flat.clear();
    flat.insert(flat.end(), g.w1.begin(), g.w1.end());
    flat.insert(flat.end(), g.b1.begin(), g.b1.end());
    flat.insert(flat.end(), g.gamma.begin(), g.gamma.end());
    flat.insert(flat.end(), g.beta.begin(), g.beta.end());
    flat.insert(flat.end(), g.w2.begin(), g.w2.end());
    flat.insert(flat.end(), g.b2.begin(), g.b2.end());
  }

  std::size_t paramCount() const {
    return w1.size() + b1.size() + gamma.size() + beta.size() + w2.size() + b2.size();
  }
};

inline void softmax2(const double* logits, double* p) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double s = e0 + e1;
  p[0] = e0 / s;
  p[1] = e1 / s;
}

}  // namespace mlsplash
