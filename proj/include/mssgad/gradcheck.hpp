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

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "mssgad/tape.hpp"

namespace mssgad {

// Builds a scalar (1x1) on the given tape from leaf variables bound to params.
using ScalarFn = std::function<Var(Tape&, const std::vector<Var>&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  Eigen::Index worst_row = 0;
  Eigen::Index worst_col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

// |a - n| / max(|a|, |n|, floor). The floor keeps coordinates whose true
// gradient is (near) zero from reporting roundoff noise as relative error.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

inline double evaluate_scalar(const ScalarFn& f, const std::vector<Matrix>& params) {
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(params.size());
  for (const Matrix& p : params) leaves.push_back(tape.constant(p));
  return f(tape, leaves).scalar();
}

inline std::vector<Matrix> tape_gradients(const ScalarFn& f, const std::vector<Matrix>& params) {
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(params.size());
  for (const Matrix& p : params) leaves.push_back(tape.variable(p));
  tape.backward(f(tape, leaves));
  std::vector<Matrix> grads;
  grads.reserve(leaves.size());
  for (const Var& v : leaves) grads.push_back(v.grad());
  return grads;
}

// Compares tape gradients with central differences (f(x+h) - f(x-h)) / 2h
// over every coordinate of every parameter.
inline GradCheckResult finite_diff_check(const ScalarFn& f, std::vector<Matrix> params,
                                         double h, double floor = 1e-6) {
  const std::vector<Matrix> analytic = tape_gradients(f, params);
  GradCheckResult res;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (Eigen::Index r = 0; r < params[p].rows(); ++r) {
      for (Eigen::Index c = 0; c < params[p].cols(); ++c) {
        const double orig = params[p](r, c);
        params[p](r, c) = orig + h;
        const double up = evaluate_scalar(f, params);
        params[p](r, c) = orig - h;
        const double down = evaluate_scalar(f, params);
        params[p](r, c) = orig;
        const double numeric = (up - down) / (2.0 * h);
        const double a = analytic[p](r, c);
        const double err = relative_error(a, numeric, floor);
        ++res.coordinates;
        if (err > res.max_rel_error || res.coordinates == 1) {
          res.max_rel_error = err;
          res.worst_param = p;
          res.worst_row = r;
          res.worst_col = c;
          res.analytic = a;
          res.numeric = numeric;
        }
      }
    }
  }
  return res;
}

}  // namespace mssgad
