// Copyright 2026 The DGN Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "dgn/tensor.hpp"

// Dynamic reverse-mode differentiation over rank-2 tensors.
//
// A Graph is a tape: every op appends one record whose inputs precede it, so
// insertion order is a topological order and backward() walks the tape once
// in reverse. Graphs are cheap and are rebuilt for every batch.

namespace dgn {

class Graph;

// Handle to a node of a Graph.
struct Var {
  Graph* graph = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

enum class UnaryKind { kSigmoid, kTanh, kRelu, kLog1p };
enum class BinaryKind { kAdd, kSub, kMul };

class Graph {
 public:
  // Receives the graph and the id of the node being differentiated; must add
  // the node's gradient contribution into its inputs' gradients.
  using BackwardFn = std::function<void(Graph&, std::size_t)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Leaves. A constant never receives a gradient; an input keeps its own
  // gradient buffer readable through grad(); a parameter leaf reads the
  // parameter's value in place and backward() accumulates into its grad.
  Var constant(Tensor value);
  Var input(Tensor value);
  Var param(Parameter& p);
  // Reads a parameter's value in place without tracking its gradient; used
  // for inference over shared read-only parameters.
  Var frozen(const Parameter& p);

  Var matmul(Var a, Var b);
  Var unary(UnaryKind kind, Var a);
  // Operands must have identical shapes, or one of them must be 1x1.
  Var binary(BinaryKind kind, Var a, Var b);

  Var sigmoid(Var a) { return unary(UnaryKind::kSigmoid, a); }
  Var tanh(Var a) { return unary(UnaryKind::kTanh, a); }
  Var relu(Var a) { return unary(UnaryKind::kRelu, a); }
  Var log1p(Var a) { return unary(UnaryKind::kLog1p, a); }
  Var add(Var a, Var b) { return binary(BinaryKind::kAdd, a, b); }
  Var sub(Var a, Var b) { return binary(BinaryKind::kSub, a, b); }
  Var mul(Var a, Var b) { return binary(BinaryKind::kMul, a, b); }
  Var scale(Var a, double factor);

  Var sum(Var a);
  Var concat_cols(std::span<const Var> parts);
  Var concat_rows(std::span<const Var> parts);
  Var slice_rows(Var a, std::size_t begin, std::size_t count);
  Var slice_cols(Var a, std::size_t begin, std::size_t count);
  // Tiles the whole of `a` vertically `times` times.
  Var repeat_rows(Var a, std::size_t times);
  // Row gather; out[i] = table[indices[i]].
  Var gather_rows(Var table, std::span<const std::size_t> indices);
  // out[r] = keep[r] ? a[r] : b[r]
  Var where_rows(std::span<const char> keep, Var a, Var b);
  // Zeroes every row whose flag is false.
  Var mask_rows(Var a, std::span<const char> keep);

  // Sliding windows over `batch` sequences stored time-major (row t*batch+b)
  // with `steps` rows each. Output row b*(steps-width+1)+t concatenates input
  // rows t..t+width-1 of sequence b.
  Var window_rows(Var x, std::size_t batch, std::size_t steps, std::size_t width);

  // Per-column maximum over each of `segments` consecutive equal-length row
  // blocks, skipping rows whose `valid` flag is false. Ties go to the first
  // row. Throws EmptySequenceError when a block has no valid row.
  Var segment_max(Var x, std::size_t segments, std::span<const char> valid);
  // Single-sequence form: x is T x d, mask has T entries; result is 1 x d.
  Var max_over_time(Var x, std::span<const char> mask) { return segment_max(x, 1, mask); }

  // Extension point for fused ops defined outside the core.
  Var custom(std::string_view kind, std::vector<std::size_t> inputs, Tensor value,
             BackwardFn backward);

  // Reverse accumulation from a 1x1 loss. Parameter gradients are added to
  // Parameter::grad, so callers zero them between steps.
  void backward(Var loss);

  const Tensor& value(Var v) const { return value(v.id); }
  const Tensor& value(std::size_t id) const;
  // Gradient of an input leaf (or any interior node) after backward(); all
  // zeros when the node was unreachable from the loss.
  std::span<const double> grad(Var v) const;

  // Gradient buffer for `id`, allocated on first use; nullptr when the node
  // does not require a gradient.
  double* grad_buffer(std::size_t id);
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  std::size_t size() const { return nodes_.size(); }
  std::string_view kind(std::size_t id) const { return nodes_[id].kind; }
  const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_[id].inputs; }

 private:
  struct Node {
    std::string_view kind;
    std::vector<std::size_t> inputs;
    Tensor value;
    const Tensor* external = nullptr;
    Parameter* param = nullptr;
    std::vector<double> grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Var push(std::string_view kind, std::vector<std::size_t> inputs, Tensor value, BackwardFn fn);
  Var leaf(std::string_view kind, Tensor value, const Tensor* external, Parameter* param,
           bool requires_grad);
  void check_owner(Var v) const;

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace dgn
