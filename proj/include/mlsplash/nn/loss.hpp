/******************************************************************************
 *
 * mlsplash - data-driven splash modeling for FLIP liquid simulations
 * Copyright 2026 the mlsplash authors
 *
 * This program is free software, distributed under the terms of the
 * Apache License, Version 2.0
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Losses: softmax negative log likelihood for the splash classifier and the
 * mean-variance-estimation likelihood for the velocity modifier
 *
 ******************************************************************************/

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "mlsplash/nn/mlp.hpp"

namespace mlsplash {

//! classifier output convention: index 0 is the splash probability.
inline int classIndex(std::uint8_t label) { return label ? 0 : 1; }

//! mean negative log softmax probability of the true class; dlogits (n x 2)
//! comes back divided by the batch size
inline double softmaxXentLoss(const double* logits, const std::uint8_t* labels, int n,
                              double* dlogits, double* accuracy = nullptr) {
  double loss = 0.0;
  int correct = 0;
  for (int i = 0; i < n; ++i) {
    double p[2];
    softmax2(logits + 2 * i, p);
    const int truth = classIndex(labels[i]);
    loss -= std::log(std::max(p[truth], 1e-300));
    if ((p[0] > p[1]) == (truth == 0)) ++correct;
    if (dlogits) {
      dlogits[2 * i + 0] = (p[0] - (truth == 0 ? 1.0 : 0.0)) / n;
      dlogits[2 * i + 1] = (p[1] - (truth == 1 ? 1.0 : 0.0)) / n;
    }
  }
  if (accuracy) *accuracy = n > 0 ? static_cast<double>(correct) / n : 0.0;
  return n > 0 ? loss / n : 0.0;
}

//! MVE negative log likelihood, mean over the batch:
//!   L = 1/2 sum_j [ (dv_j - mu_j)^2 / sigma2_j + ln sigma2_j ]
//! The variance head predicts s = ln sigma2. With var_frozen the variance is
//! pinned at one and the loss reduces to half squared error.
inline double mveLoss(const double* mu, const double* s, const double* dv, int n, int dim,
                      bool var_frozen, double* dmu, double* ds) {
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) {
      const std::size_t k = static_cast<std::size_t>(i * dim + j);
      const double resid = dv[k] - mu[k];
      if (var_frozen) {
        loss += 0.5 * resid * resid;
        if (dmu) dmu[k] = -resid / n;
        if (ds) ds[k] = 0.0;
      } else {
        const double sij = s[k];
        const double inv_var = std::exp(-sij);
        loss += 0.5 * (resid * resid * inv_var + sij);
        if (dmu) dmu[k] = -resid * inv_var / n;
        if (ds) ds[k] = 0.5 * (1.0 - resid * resid * inv_var) / n;
      }
    }
  }
  return n > 0 ? loss / n : 0.0;
}

}  // namespace mlsplash
