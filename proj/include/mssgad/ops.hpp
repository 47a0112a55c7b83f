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

namespace mssgad::ops {

namespace detail {

inline std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

inline void same_tape(const Var& a, const Var& b) {
  if (&a.tape() != &b.tape()) throw TapeError("operands recorded on different tapes");
}

}  // namespace detail

// C = A * B.  dA = dC * B^T, dB = A^T * dC.
inline Var matmul(const Var& a, const Var& b) {
  detail::same_tape(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows()) {
    throw DimensionError("matmul: " + detail::shape(av) + " * " + detail::shape(bv));
  }
  const std::size_t ia = a.index(), ib = b.index();
  return a.tape().record(
      av * bv, {a, b},
      [ia, ib](Tape& t, const Matrix& g) {
        t.accumulate_with(ia, [&] { return Matrix(g * t.value(ib).transpose()); });
        t.accumulate_with(ib, [&] { return Matrix(t.value(ia).transpose() * g); });
      },
      "matmul");
}

inline Var relu(const Var& x) {
  const std::size_t ix = x.index();
  return x.tape().record(
      x.value().cwiseMax(0.0), {x},
      [ix](Tape& t, const Matrix& g) {
        const Matrix& xv = t.value(ix);
        t.accumulate(ix, (xv.array() > 0.0).select(g, 0.0));
      },
      "relu");
}

// Column-wise maximum over rows, producing 1 x cols. The gradient of each
// column goes to the first row attaining the maximum.
inline Var row_max_pool(const Var& h) {
  const Matrix& hv = h.value();
  if (hv.rows() == 0) throw DimensionError("row_max_pool: empty input");
  const Eigen::Index cols = hv.cols();
  std::vector<Eigen::Index> argmax(static_cast<std::size_t>(cols), 0);
  Matrix out(1, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < hv.rows(); ++i) {
      if (hv(i, j) > hv(best, j)) best = i;
    }
    argmax[static_cast<std::size_t>(j)] = best;
    out(0, j) = hv(best, j);
  }
  const std::size_t ih = h.index();
  const Eigen::Index rows = hv.rows();
  return h.tape().record(
      std::move(out), {h},
      [ih, rows, argmax = std::move(argmax)](Tape& t, const Matrix& g) {
        Matrix d = Matrix::Zero(rows, g.cols());
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
          d(argmax[static_cast<std::size_t>(j)], j) = g(0, j);
        }
        t.accumulate(ih, d);
      },
      "row_max_pool");
}

inline Var row_mean_pool(const Var& h) {
  const Matrix& hv = h.value();
  if (hv.rows() == 0) throw DimensionError("row_mean_pool: empty input");
  const std::size_t ih = h.index();
  const Eigen::Index rows = hv.rows();
  return h.tape().record(
      Matrix(hv.colwise().mean()), {h},
      [ih, rows](Tape& t, const Matrix& g) {
        t.accumulate(ih, Matrix(g.replicate(rows, 1) / static_cast<double>(rows)));
      },
      "row_mean_pool");
}

// Each row divided by max(||row||, eps).
inline Var l2_normalize_rows(const Var& h, double eps) {
  if (!(eps > 0.0)) throw DimensionError("l2_normalize_rows: eps must be positive");
  const Matrix& hv = h.value();
  Eigen::VectorXd denom(hv.rows());
  Matrix out(hv.rows(), hv.cols());
  for (Eigen::Index i = 0; i < hv.rows(); ++i) {
    denom(i) = std::max(hv.row(i).norm(), eps);
    out.row(i) = hv.row(i) / denom(i);
  }
  const std::size_t ih = h.index();
  return h.tape().record(
      out, {h},
      [ih, eps, denom, out](Tape& t, const Matrix& g) {
        Matrix d(g.rows(), g.cols());
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
          if (denom(i) > eps) {
            const double proj = out.row(i).dot(g.row(i));
            d.row(i) = (g.row(i) - proj * out.row(i)) / denom(i);
          } else {
            d.row(i) = g.row(i) / eps;
          }
        }
        t.accumulate(ih, d);
      },
      "l2_normalize_rows");
}

inline Var add(const Var& a, const Var& b) {
  detail::same_tape(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("add: " + detail::shape(a.value()) + " + " + detail::shape(b.value()));
  }
  const std::size_t ia = a.index(), ib = b.index();
  return a.tape().record(
      a.value() + b.value(), {a, b},
      [ia, ib](Tape& t, const Matrix& g) {
        t.accumulate(ia, g);
        t.accumulate(ib, g);
      },
      "add");
}

inline Var sub(const Var& a, const Var& b) {
  detail::same_tape(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("sub: " + detail::shape(a.value()) + " - " + detail::shape(b.value()));
  }
  const std::size_t ia = a.index(), ib = b.index();
  return a.tape().record(
      a.value() - b.value(), {a, b},
      [ia, ib](Tape& t, const Matrix& g) {
        t.accumulate(ia, g);
        t.accumulate_with(ib, [&] { return Matrix(-g); });
      },
      "sub");
}

inline Var scale(const Var& x, double s) {
  const std::size_t ix = x.index();
  return x.tape().record(
      x.value() * s, {x},
      [ix, s](Tape& t, const Matrix& g) { t.accumulate(ix, Matrix(g * s)); }, "scale");
}

inline Var hadamard(const Var& a, const Var& b) {
  detail::same_tape(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("hadamard: " + detail::shape(a.value()) + " .* " +
                         detail::shape(b.value()));
  }
  const std::size_t ia = a.index(), ib = b.index();
  return a.tape().record(
      a.value().cwiseProduct(b.value()), {a, b},
      [ia, ib](Tape& t, const Matrix& g) {
        t.accumulate_with(ia, [&] { return Matrix(g.cwiseProduct(t.value(ib))); });
        t.accumulate_with(ib, [&] { return Matrix(g.cwiseProduct(t.value(ia))); });
      },
      "hadamard");
}

// Sum of all entries, as a 1x1 tensor.
inline Var sum(const Var& x) {
  const std::size_t ix = x.index();
  const Eigen::Index r = x.rows(), c = x.cols();
  Matrix out(1, 1);
  out(0, 0) = x.value().sum();
  return x.tape().record(
      std::move(out), {x},
      [ix, r, c](Tape& t, const Matrix& g) {
        t.accumulate(ix, Matrix::Constant(r, c, g(0, 0)));
      },
      "sum");
}

// Vertical concatenation; all parts must share the column count.
inline Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no inputs");
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const Var& p : parts) {
    detail::same_tape(parts.front(), p);
    if (p.cols() != cols) throw DimensionError("concat_rows: column count mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::vector<std::pair<std::size_t, Eigen::Index>> slots;
  slots.reserve(parts.size());
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    slots.emplace_back(p.index(), at);
    at += p.rows();
  }
  return parts.front().tape().record(
      std::move(out), parts,
      [slots = std::move(slots)](Tape& t, const Matrix& g) {
        for (const auto& [idx, offset] : slots) {
          t.accumulate_with(idx, [&] {
            return Matrix(g.middleRows(offset, t.value(idx).rows()));
          });
        }
      },
      "concat_rows");
}

// Mean Euclidean distance over all row pairs (a_i, b_j), as a 1x1 tensor.
// Coincident rows contribute the zero subgradient.
inline Var pairwise_mean_distance(const Var& a, const Var& b) {
  detail::same_tape(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() == 0 || bv.rows() == 0) {
    throw DimensionError("pairwise_mean_distance: empty operand");
  }
  if (av.cols() != bv.cols()) {
    throw DimensionError("pairwise_mean_distance: " + detail::shape(av) + " vs " +
                         detail::shape(bv));
  }
  const double pairs = static_cast<double>(av.rows()) * static_cast<double>(bv.rows());
  double total = 0.0;
  for (Eigen::Index i = 0; i < av.rows(); ++i) {
    for (Eigen::Index j = 0; j < bv.rows(); ++j) {
      total += (av.row(i) - bv.row(j)).norm();
    }
  }
  Matrix out(1, 1);
  out(0, 0) = total / pairs;
  const std::size_t ia = a.index(), ib = b.index();
  return a.tape().record(
      std::move(out), {a, b},
      [ia, ib, pairs](Tape& t, const Matrix& g) {
        const Matrix& av = t.value(ia);
        const Matrix& bv = t.value(ib);
        Matrix da = Matrix::Zero(av.rows(), av.cols());
        Matrix db = Matrix::Zero(bv.rows(), bv.cols());
        const double w = g(0, 0) / pairs;
        for (Eigen::Index i = 0; i < av.rows(); ++i) {
          for (Eigen::Index j = 0; j < bv.rows(); ++j) {
            Eigen::RowVectorXd diff = av.row(i) - bv.row(j);
            const double n = diff.norm();
            if (n == 0.0) continue;
            diff *= w / n;
            da.row(i) += diff;
            db.row(j) -= diff;
          }
        }
        t.accumulate(ia, da);
        t.accumulate(ib, db);
      },
      "pairwise_mean_distance");
}

}  // namespace mssgad::ops
