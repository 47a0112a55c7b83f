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

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mssgad/error.hpp"

namespace mssgad {

// Dense row-major matrix of doubles; the value type of every tensor.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Tape;

// Handle to a tensor recorded on a Tape. Cheap to copy; only valid while the
// owning tape is alive.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t index) : tape_(tape), index_(index) {}

  Tape& tape() const { return *tape_; }
  std::size_t index() const { return index_; }
  bool valid() const { return tape_ != nullptr; }

  const Matrix& value() const;
  // Accumulated gradient after Tape::backward; zeros when nothing flowed here.
  Matrix grad() const;
  bool requires_grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const;

 private:
  Tape* tape_ = nullptr;
  std::size_t index_ = 0;
};

// Records operations in execution order and runs the reverse pass. A tape is
// a single-threaded unit of work; it supports exactly one backward pass.
class Tape {
 public:
  // Receives the gradient w.r.t. the node's output and pushes contributions
  // into the parents through Tape::accumulate.
  using Backward = std::function<void(Tape&, const Matrix&)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value) { return push(std::move(value), false, {}, "constant"); }
  Var variable(Matrix value) { return push(std::move(value), true, {}, "variable"); }

  // Appends an operation result. `backward` is kept only when some parent
  // requires a gradient.
  Var record(Matrix value, std::initializer_list<Var> parents, Backward backward,
             const char* op) {
    bool needs = false;
    for (const Var& p : parents) needs = needs || nodes_[p.index()].requires_grad;
    return push(std::move(value), needs, needs ? std::move(backward) : Backward{}, op);
  }

  Var record(Matrix value, const std::vector<Var>& parents, Backward backward,
             const char* op) {
    bool needs = false;
    for (const Var& p : parents) needs = needs || nodes_[p.index()].requires_grad;
    return push(std::move(value), needs, needs ? std::move(backward) : Backward{}, op);
  }

  const Matrix& value(std::size_t i) const { return nodes_.at(i).value; }
  bool requires_grad(std::size_t i) const { return nodes_.at(i).requires_grad; }
  std::size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

  Matrix grad(std::size_t i) const {
    const Node& n = nodes_.at(i);
    if (n.grad.size() == 0) return Matrix::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  // Adds `g` into the gradient slot of node `i`; no-op for constants.
  void accumulate(std::size_t i, const Matrix& g) {
    Node& n = nodes_[i];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

  template <typename Fn>
  void accumulate_with(std::size_t i, Fn&& make) {
    if (nodes_[i].requires_grad) accumulate(i, make());
  }

  // Reverse pass from a 1x1 root. Visits nodes strictly in reverse recording
  // order, so the cost is linear in the tape length.
  void backward(const Var& root) {
    if (root.valid() && &root.tape() != this) {
      throw TapeError("backward root belongs to a different tape");
    }
    if (consumed_) {
      throw TapeError("backward already ran on this tape; re-run the forward pass first");
    }
    const Node& r = nodes_.at(root.index());
    if (r.value.rows() != 1 || r.value.cols() != 1) {
      throw DimensionError("backward root must be 1x1, got " +
                           std::to_string(r.value.rows()) + "x" +
                           std::to_string(r.value.cols()));
    }
    consumed_ = true;
    if (!r.requires_grad) return;
    nodes_[root.index()].grad = Matrix::Ones(1, 1);
    for (std::size_t i = root.index() + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.backward || n.grad.size() == 0) continue;
      // Copy: the callback may grow other grad slots but never this one.
      const Matrix g = n.grad;
      n.backward(*this, g);
    }
  }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Backward backward;
  };

  Var push(Matrix value, bool requires_grad, Backward backward, const char* op) {
    if (consumed_) throw TapeError("cannot record on a tape after backward");
    if (!value.allFinite()) {
      throw NumericError(std::string("non-finite value produced by ") + op);
    }
    nodes_.push_back(Node{std::move(value), Matrix{}, requires_grad, std::move(backward)});
    return Var(this, nodes_.size() - 1);
  }

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

inline const Matrix& Var::value() const { return tape_->value(index_); }
inline Matrix Var::grad() const { return tape_->grad(index_); }
inline bool Var::requires_grad() const { return tape_->requires_grad(index_); }
inline double Var::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw DimensionError("scalar() on a non-1x1 tensor");
  return v(0, 0);
}

}  // namespace mssgad
