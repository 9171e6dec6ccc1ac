/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * ADAM optimizer with decoupled weight decay
 *
 ******************************************************************************/

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace mlsplash {

struct AdamConfig {
  double learning_rate = 1e-4;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(std::size_t n) : m_(n, 0.0), v_(n, 0.0) {}

  //! one update over parameters exposed as pointers, gradients flat; decay
  //! applies only where the mask is set (weight matrices, not biases or
  //! normalization parameters)
  void step(const std::vector<double*>& params, const std::vector<double>& grads,
            const AdamConfig& cfg, const std::vector<std::uint8_t>& decay_mask) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double g = grads[i];
      m_[i] = cfg.beta1 * m_[i] + (1.0 - cfg.beta1) * g;
      v_[i] = cfg.beta2 * v_[i] + (1.0 - cfg.beta2) * g * g;
      const double mhat = m_[i] / bc1;
      const double vhat = v_[i] / bc2;
      double& w = *params[i];
      const double decay = decay_mask[i] ? cfg.weight_decay * w : 0.0;
      w -= cfg.learning_rate * (mhat / (std::sqrt(vhat) + cfg.eps) + decay);
    }
  }

 private:
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

}  // namespace mlsplash
