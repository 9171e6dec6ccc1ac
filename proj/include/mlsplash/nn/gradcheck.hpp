/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Verification of the hand-derived backpropagation against central finite
 * differences. Batch norm runs in frozen-statistics mode, dropout is off.
 *
 ******************************************************************************/

#pragma once

#include <functional>

#include "mlsplash/nn/mlp.hpp"

namespace mlsplash {

//! loss adapter: given the network outputs (n x out), return the loss and
//! fill the gradient with respect to the outputs
using LossWithGrad = std::function<double(const double* y, int n, double* dy)>;

//! maximum relative error between analytic and central finite-difference
//! gradients over all parameters
inline double gradientCheck(Mlp& net, const std::vector<double>& X, int n,
                            const LossWithGrad& loss, double step = 1e-5) {
  Mlp::Cache cache;
  Mlp::Grads grads;
  net.forward(X.data(), n, cache, false, 0.0, nullptr, false);
  std::vector<double> dy(cache.y.size());
  loss(cache.y.data(), n, dy.data());
  net.backward(cache, dy.data(), false, grads);
  std::vector<double> analytic;
  net.collectGrads(grads, analytic);

  std::vector<double*> params;
  net.visitParams([&](double& w) { params.push_back(&w); });

  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& w = *params[i];
    const double saved = w;
    const double dw = step * std::max(1.0, std::abs(saved));
    w = saved + dw;
    net.forward(X.data(), n, cache, false, 0.0, nullptr, false);
    const double lp = loss(cache.y.data(), n, dy.data());
    w = saved - dw;
    net.forward(X.data(), n, cache, false, 0.0, nullptr, false);
    const double lm = loss(cache.y.data(), n, dy.data());
    w = saved;
    const double fd = (lp - lm) / (2.0 * dw);
    const double rel =
        std::abs(analytic[i] - fd) / std::max({std::abs(analytic[i]), std::abs(fd), 1e-6});
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace mlsplash
