/*
 * Copyright 2026 The MssGAD Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mssgad/tape.hpp"

namespace mssgad {

namespace detail {

inline void check_step_inputs(const std::vector<Matrix>& params,
                              const std::vector<Matrix>& grads) {
  if (params.size() != grads.size()) {
    throw DimensionError("optimizer: " + std::to_string(params.size()) + " params but " +
                         std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].rows() != grads[i].rows() || params[i].cols() != grads[i].cols()) {
      throw DimensionError("optimizer: gradient shape mismatch for parameter " +
                           std::to_string(i));
    }
    if (!grads[i].allFinite()) {
      throw NumericError("optimizer: non-finite gradient in parameter " + std::to_string(i) +
                         "; training aborted");
    }
  }
}

}  // namespace detail

// Plain gradient descent. Gradients are zeroed after the update.
inline void sgd_step(std::vector<Matrix>& params, std::vector<Matrix>& grads, double lr) {
  detail::check_step_inputs(params, grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] -= lr * grads[i];
    grads[i].setZero();
  }
}

// Adam with bias correction. Moment state persists across calls and is sized
// lazily on the first step.
class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::vector<Matrix>& params, std::vector<Matrix>& grads) {
    detail::check_step_inputs(params, grads);
    if (m_.empty()) {
      for (const Matrix& p : params) {
        m_.push_back(Matrix::Zero(p.rows(), p.cols()));
        v_.push_back(Matrix::Zero(p.rows(), p.cols()));
      }
    }
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i].cwiseProduct(grads[i]);
      params[i].array() -=
          lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
      grads[i].setZero();
    }
  }

  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Matrix> m_, v_;
};

}  // namespace mssgad
