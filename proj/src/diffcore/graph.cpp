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

#include "dgn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dgn/error.hpp"
#include "dgn/kernels.hpp"

namespace dgn {

const Tensor& Var::value() const { return graph->value(id); }

namespace {

void require_rank2(const Tensor& t, std::string_view op) {
  if (t.rank() != 2)
    throw DimensionError(std::string(op) + " expects a rank-2 operand, got " +
                         shape_string(t.shape()));
}

double sigmoid_value(double x) {
  // Split by sign so exp never overflows.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void Graph::check_owner(Var v) const {
  if (v.graph != this || v.id >= nodes_.size())
    throw ContractError("variable does not belong to this graph");
}

Var Graph::leaf(std::string_view kind, Tensor value, const Tensor* external, Parameter* param,
                bool requires_grad) {
  Node node;
  node.kind = kind;
  node.value = std::move(value);
  node.external = external;
  node.param = param;
  node.requires_grad = requires_grad;
  const Tensor& v = external != nullptr ? *external : node.value;
  require_rank2(v, kind);
  if (!v.all_finite()) throw NumericError(std::string(kind) + " leaf holds a non-finite value");
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

Var Graph::constant(Tensor value) {
  return leaf("constant", std::move(value), nullptr, nullptr, false);
}

Var Graph::input(Tensor value) { return leaf("input", std::move(value), nullptr, nullptr, true); }

Var Graph::param(Parameter& p) {
  if (p.grad.shape() != p.value.shape()) p.grad = Tensor(p.value.shape());
  return leaf("param", Tensor(), &p.value, &p, true);
}

Var Graph::frozen(const Parameter& p) {
  return leaf("frozen", Tensor(), &p.value, nullptr, false);
}

Var Graph::push(std::string_view kind, std::vector<std::size_t> inputs, Tensor value,
                BackwardFn fn) {
  if (!value.all_finite())
    throw NumericError("op '" + std::string(kind) + "' produced a non-finite value");
  Node node;
  node.kind = kind;
  node.requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                   [&](std::size_t i) { return nodes_[i].requires_grad; });
  node.inputs = std::move(inputs);
  node.value = std::move(value);
  if (node.requires_grad) node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

Var Graph::custom(std::string_view kind, std::vector<std::size_t> inputs, Tensor value,
                  BackwardFn backward) {
  for (std::size_t i : inputs)
    if (i >= nodes_.size()) throw ContractError("custom op input out of range");
  return push(kind, std::move(inputs), std::move(value), std::move(backward));
}

const Tensor& Graph::value(std::size_t id) const {
  const Node& n = nodes_.at(id);
  return n.external != nullptr ? *n.external : n.value;
}

double* Graph::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return nullptr;
  if (n.param != nullptr) return n.param->grad.data();
  if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
  return n.grad.data();
}

std::span<const double> Graph::grad(Var v) const {
  check_owner(v);
  const Node& n = nodes_[v.id];
  if (n.param != nullptr) return n.param->grad.values();
  if (n.grad.empty()) {
    // Unreached nodes report zeros.
    auto& self = const_cast<Node&>(n);
    self.grad.assign(value(v.id).size(), 0.0);
  }
  return n.grad;
}

Var Graph::matmul(Var a, Var b) {
  check_owner(a);
  check_owner(b);
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  if (av.cols() != bv.rows())
    throw DimensionError("matmul inner extents differ: " + shape_string(av.shape()) + " x " +
                         shape_string(bv.shape()));
  const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
  Tensor out = Tensor::zeros(m, n);
  kernels::active().gemm_nn(av.data(), bv.data(), out.data(), m, k, n);
  return push("matmul", {a.id, b.id}, std::move(out), [m, k, n](Graph& g, std::size_t self) {
    const std::size_t ia = g.inputs(self)[0], ib = g.inputs(self)[1];
    const double* dc = g.grad_buffer(self);
    const auto& kt = kernels::active();
    if (double* da = g.grad_buffer(ia)) kt.gemm_nt(dc, g.value(ib).data(), da, m, n, k);
    if (double* db = g.grad_buffer(ib)) kt.gemm_tn(g.value(ia).data(), dc, db, m, k, n);
  });
}

Var Graph::unary(UnaryKind kind, Var a) {
  check_owner(a);
  const Tensor& av = value(a);
  Tensor out(av.shape());
  const std::size_t n = av.size();
  const double* x = av.data();
  double* y = out.data();
  std::string_view name;
  switch (kind) {
    case UnaryKind::kSigmoid:
      name = "sigmoid";
      for (std::size_t i = 0; i < n; ++i) y[i] = sigmoid_value(x[i]);
      break;
    case UnaryKind::kTanh:
      name = "tanh";
      for (std::size_t i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
      break;
    case UnaryKind::kRelu:
      name = "relu";
      for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
      break;
    case UnaryKind::kLog1p:
      name = "log1p";
      for (std::size_t i = 0; i < n; ++i) {
        if (x[i] < 0.0) throw DomainError("log1p of negative value " + std::to_string(x[i]));
        y[i] = std::log1p(x[i]);
      }
      break;
  }
  return push(name, {a.id}, std::move(out), [kind, n](Graph& g, std::size_t self) {
    const std::size_t ia = g.inputs(self)[0];
    double* dx = g.grad_buffer(ia);
    if (dx == nullptr) return;
    const double* dy = g.grad_buffer(self);
    const double* x = g.value(ia).data();
    const double* y = g.value(self).data();
    for (std::size_t i = 0; i < n; ++i) {
      double local = 0.0;
      switch (kind) {
        case UnaryKind::kSigmoid: local = y[i] * (1.0 - y[i]); break;
        case UnaryKind::kTanh: local = 1.0 - y[i] * y[i]; break;
        case UnaryKind::kRelu: local = x[i] > 0.0 ? 1.0 : 0.0; break;
        case UnaryKind::kLog1p: local = 1.0 / (1.0 + x[i]); break;
      }
      dx[i] += dy[i] * local;
    }
  });
}

Var Graph::binary(BinaryKind kind, Var a, Var b) {
  check_owner(a);
  check_owner(b);
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  const bool a_scalar = av.size() == 1 && bv.size() != 1;
  const bool b_scalar = bv.size() == 1 && av.size() != 1;
  if (!a_scalar && !b_scalar && av.shape() != bv.shape())
    throw DimensionError("elementwise shapes differ: " + shape_string(av.shape()) + " vs " +
                         shape_string(bv.shape()));
  Tensor out(a_scalar ? bv.shape() : av.shape());
  const std::size_t n = out.size();
  const double* x = av.data();
  const double* y = bv.data();
  double* z = out.data();
  const auto& kt = kernels::active();
  std::string_view name;
  if (!a_scalar && !b_scalar) {
    switch (kind) {
      case BinaryKind::kAdd: name = "add"; kt.add(x, y, z, n); break;
      case BinaryKind::kMul: name = "mul"; kt.mul(x, y, z, n); break;
      case BinaryKind::kSub:
        name = "sub";
        for (std::size_t i = 0; i < n; ++i) z[i] = x[i] - y[i];
        break;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double l = a_scalar ? x[0] : x[i];
      const double r = b_scalar ? y[0] : y[i];
      switch (kind) {
        case BinaryKind::kAdd: name = "add"; z[i] = l + r; break;
        case BinaryKind::kSub: name = "sub"; z[i] = l - r; break;
        case BinaryKind::kMul: name = "mul"; z[i] = l * r; break;
      }
    }
  }
  return push(name, {a.id, b.id}, std::move(out),
              [kind, n, a_scalar, b_scalar](Graph& g, std::size_t self) {
                const std::size_t ia = g.inputs(self)[0], ib = g.inputs(self)[1];
                const double* dz = g.grad_buffer(self);
                const double* x = g.value(ia).data();
                const double* y = g.value(ib).data();
                double* dx = g.grad_buffer(ia);
                double* dy = g.grad_buffer(ib);
                for (std::size_t i = 0; i < n; ++i) {
                  const std::size_t xi = a_scalar ? 0 : i;
                  const std::size_t yi = b_scalar ? 0 : i;
                  switch (kind) {
                    case BinaryKind::kAdd:
                      if (dx) dx[xi] += dz[i];
                      if (dy) dy[yi] += dz[i];
                      break;
                    case BinaryKind::kSub:
                      if (dx) dx[xi] += dz[i];
                      if (dy) dy[yi] -= dz[i];
                      break;
                    case BinaryKind::kMul:
                      if (dx) dx[xi] += dz[i] * y[yi];
                      if (dy) dy[yi] += dz[i] * x[xi];
                      break;
                  }
                }
              });
}

Var Graph::scale(Var a, double factor) {
  check_owner(a);
  Tensor out = value(a);
  for (double& v : out.values()) v *= factor;
  const std::size_t n = out.size();
  return push("scale", {a.id}, std::move(out), [factor, n](Graph& g, std::size_t self) {
    double* dx = g.grad_buffer(g.inputs(self)[0]);
    const double* dy = g.grad_buffer(self);
    if (dx) kernels::active().axpy(factor, dy, dx, n);
  });
}

Var Graph::sum(Var a) {
  check_owner(a);
  const Tensor& av = value(a);
  double total = 0.0;
  for (double v : av.values()) total += v;
  const std::size_t n = av.size();
  return push("sum", {a.id}, Tensor::scalar(total), [n](Graph& g, std::size_t self) {
    double* dx = g.grad_buffer(g.inputs(self)[0]);
    if (dx == nullptr) return;
    const double d = g.grad_buffer(self)[0];
    for (std::size_t i = 0; i < n; ++i) dx[i] += d;
  });
}

Var Graph::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_cols needs at least one part");
  const std::size_t rows = value(parts[0]).rows();
  std::vector<std::size_t> ids, widths;
  std::size_t total = 0;
  for (Var p : parts) {
    check_owner(p);
    const Tensor& t = value(p);
    if (t.rows() != rows)
      throw DimensionError("concat_cols row counts differ: " + std::to_string(rows) + " vs " +
                           std::to_string(t.rows()));
    ids.push_back(p.id);
    widths.push_back(t.cols());
    total += t.cols();
  }
  Tensor out = Tensor::zeros(rows, total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& t = value(parts[k]);
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(t.data() + r * widths[k], widths[k], out.data() + r * total + offset);
    offset += widths[k];
  }
  return push("concat_cols", std::move(ids), std::move(out),
              [rows, total, widths](Graph& g, std::size_t self) {
                const double* dy = g.grad_buffer(self);
                std::size_t offset = 0;
                for (std::size_t k = 0; k < widths.size(); ++k) {
                  if (double* dx = g.grad_buffer(g.inputs(self)[k])) {
                    for (std::size_t r = 0; r < rows; ++r)
                      kernels::active().axpy(1.0, dy + r * total + offset, dx + r * widths[k],
                                             widths[k]);
                  }
                  offset += widths[k];
                }
              });
}

Var Graph::concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_rows needs at least one part");
  const std::size_t cols = value(parts[0]).cols();
  std::vector<std::size_t> ids, sizes;
  std::size_t rows = 0;
  for (Var p : parts) {
    check_owner(p);
    const Tensor& t = value(p);
    if (t.cols() != cols)
      throw DimensionError("concat_rows column counts differ: " + std::to_string(cols) + " vs " +
                           std::to_string(t.cols()));
    ids.push_back(p.id);
    sizes.push_back(t.size());
    rows += t.rows();
  }
  Tensor out = Tensor::zeros(rows, cols);
  double* dst = out.data();
  for (Var p : parts) {
    const Tensor& t = value(p);
    dst = std::copy_n(t.data(), t.size(), dst);
  }
  return push("concat_rows", std::move(ids), std::move(out), [sizes](Graph& g, std::size_t self) {
    const double* dy = g.grad_buffer(self);
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      if (double* dx = g.grad_buffer(g.inputs(self)[k]))
        kernels::active().axpy(1.0, dy, dx, sizes[k]);
      dy += sizes[k];
    }
  });
}

Var Graph::slice_rows(Var a, std::size_t begin, std::size_t count) {
  check_owner(a);
  const Tensor& av = value(a);
  if (count == 0 || begin + count > av.rows())
    throw DimensionError("slice_rows [" + std::to_string(begin) + ", +" + std::to_string(count) +
                         ") outside " + shape_string(av.shape()));
  const std::size_t cols = av.cols();
  Tensor out({count, cols},
             std::vector<double>(av.data() + begin * cols, av.data() + (begin + count) * cols));
  return push("slice_rows", {a.id}, std::move(out),
              [offset = begin * cols, n = count * cols](Graph& g, std::size_t self) {
                if (double* dx = g.grad_buffer(g.inputs(self)[0]))
                  kernels::active().axpy(1.0, g.grad_buffer(self), dx + offset, n);
              });
}

Var Graph::slice_cols(Var a, std::size_t begin, std::size_t count) {
  check_owner(a);
  const Tensor& av = value(a);
  if (count == 0 || begin + count > av.cols())
    throw DimensionError("slice_cols [" + std::to_string(begin) + ", +" + std::to_string(count) +
                         ") outside " + shape_string(av.shape()));
  const std::size_t rows = av.rows(), cols = av.cols();
  Tensor out = Tensor::zeros(rows, count);
  for (std::size_t r = 0; r < rows; ++r)
    std::copy_n(av.data() + r * cols + begin, count, out.data() + r * count);
  return push("slice_cols", {a.id}, std::move(out),
              [rows, cols, begin, count](Graph& g, std::size_t self) {
                double* dx = g.grad_buffer(g.inputs(self)[0]);
                if (dx == nullptr) return;
                const double* dy = g.grad_buffer(self);
                for (std::size_t r = 0; r < rows; ++r)
                  kernels::active().axpy(1.0, dy + r * count, dx + r * cols + begin, count);
              });
}

Var Graph::repeat_rows(Var a, std::size_t times) {
  check_owner(a);
  if (times == 0) throw ContractError("repeat_rows needs times >= 1");
  const Tensor& av = value(a);
  const std::size_t n = av.size();
  Tensor out = Tensor::zeros(av.rows() * times, av.cols());
  for (std::size_t t = 0; t < times; ++t) std::copy_n(av.data(), n, out.data() + t * n);
  return push("repeat_rows", {a.id}, std::move(out), [n, times](Graph& g, std::size_t self) {
    double* dx = g.grad_buffer(g.inputs(self)[0]);
    if (dx == nullptr) return;
    const double* dy = g.grad_buffer(self);
    for (std::size_t t = 0; t < times; ++t) kernels::active().axpy(1.0, dy + t * n, dx, n);
  });
}

Var Graph::gather_rows(Var table, std::span<const std::size_t> indices) {
  check_owner(table);
  if (indices.empty()) throw ContractError("gather_rows needs at least one index");
  const Tensor& tv = value(table);
  const std::size_t cols = tv.cols();
  for (std::size_t i : indices)
    if (i >= tv.rows())
      throw VocabularyError("row index " + std::to_string(i) + " outside table of " +
                            std::to_string(tv.rows()) + " rows");
  Tensor out = Tensor::zeros(indices.size(), cols);
  for (std::size_t r = 0; r < indices.size(); ++r)
    std::copy_n(tv.data() + indices[r] * cols, cols, out.data() + r * cols);
  return push("gather_rows", {table.id}, std::move(out),
              [idx = std::vector<std::size_t>(indices.begin(), indices.end()), cols](
                  Graph& g, std::size_t self) {
                double* dt = g.grad_buffer(g.inputs(self)[0]);
                if (dt == nullptr) return;
                const double* dy = g.grad_buffer(self);
                for (std::size_t r = 0; r < idx.size(); ++r)
                  kernels::active().axpy(1.0, dy + r * cols, dt + idx[r] * cols, cols);
              });
}

Var Graph::where_rows(std::span<const char> keep, Var a, Var b) {
  check_owner(a);
  check_owner(b);
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  if (av.shape() != bv.shape())
    throw DimensionError("where_rows shapes differ: " + shape_string(av.shape()) + " vs " +
                         shape_string(bv.shape()));
  if (keep.size() != av.rows())
    throw DimensionError("where_rows mask has " + std::to_string(keep.size()) + " entries for " +
                         std::to_string(av.rows()) + " rows");
  const std::size_t cols = av.cols();
  Tensor out = bv;
  for (std::size_t r = 0; r < keep.size(); ++r)
    if (keep[r]) std::copy_n(av.data() + r * cols, cols, out.data() + r * cols);
  return push("where_rows", {a.id, b.id}, std::move(out),
              [flags = std::vector<char>(keep.begin(), keep.end()), cols](Graph& g,
                                                                          std::size_t self) {
                const double* dy = g.grad_buffer(self);
                double* da = g.grad_buffer(g.inputs(self)[0]);
                double* db = g.grad_buffer(g.inputs(self)[1]);
                for (std::size_t r = 0; r < flags.size(); ++r) {
                  double* dst = flags[r] ? da : db;
                  if (dst) kernels::active().axpy(1.0, dy + r * cols, dst + r * cols, cols);
                }
              });
}

Var Graph::mask_rows(Var a, std::span<const char> keep) {
  check_owner(a);
  const Tensor& av = value(a);
  if (keep.size() != av.rows())
    throw DimensionError("mask_rows mask has " + std::to_string(keep.size()) + " entries for " +
                         std::to_string(av.rows()) + " rows");
  const std::size_t cols = av.cols();
  Tensor out = av;
  for (std::size_t r = 0; r < keep.size(); ++r)
    if (!keep[r]) std::fill_n(out.data() + r * cols, cols, 0.0);
  return push("mask_rows", {a.id}, std::move(out),
              [flags = std::vector<char>(keep.begin(), keep.end()), cols](Graph& g,
                                                                          std::size_t self) {
                double* dx = g.grad_buffer(g.inputs(self)[0]);
                if (dx == nullptr) return;
                const double* dy = g.grad_buffer(self);
                for (std::size_t r = 0; r < flags.size(); ++r)
                  if (flags[r]) kernels::active().axpy(1.0, dy + r * cols, dx + r * cols, cols);
              });
}

Var Graph::window_rows(Var x, std::size_t batch, std::size_t steps, std::size_t width) {
  check_owner(x);
  const Tensor& xv = value(x);
  if (batch == 0 || width == 0 || xv.rows() != batch * steps)
    throw DimensionError("window_rows: " + shape_string(xv.shape()) + " is not " +
                         std::to_string(batch) + " sequences of " + std::to_string(steps) +
                         " steps");
  if (steps < width)
    throw DimensionError("window_rows: sequence of " + std::to_string(steps) +
                         " steps is shorter than window width " + std::to_string(width));
  const std::size_t cols = xv.cols();
  const std::size_t windows = steps - width + 1;
  const std::size_t out_cols = width * cols;
  Tensor out = Tensor::zeros(batch * windows, out_cols);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < windows; ++t)
      for (std::size_t j = 0; j < width; ++j)
        std::copy_n(xv.data() + ((t + j) * batch + b) * cols, cols,
                    out.data() + (b * windows + t) * out_cols + j * cols);
  return push("window_rows", {x.id}, std::move(out),
              [batch, windows, width, cols, out_cols](Graph& g, std::size_t self) {
                double* dx = g.grad_buffer(g.inputs(self)[0]);
                if (dx == nullptr) return;
                const double* dy = g.grad_buffer(self);
                const auto& kt = kernels::active();
                for (std::size_t b = 0; b < batch; ++b)
                  for (std::size_t t = 0; t < windows; ++t)
                    for (std::size_t j = 0; j < width; ++j)
                      kt.axpy(1.0, dy + (b * windows + t) * out_cols + j * cols,
                              dx + ((t + j) * batch + b) * cols, cols);
              });
}

Var Graph::segment_max(Var x, std::size_t segments, std::span<const char> valid) {
  check_owner(x);
  const Tensor& xv = value(x);
  if (segments == 0 || xv.rows() % segments != 0)
    throw DimensionError("segment_max: " + std::to_string(xv.rows()) +
                         " rows do not split into " + std::to_string(segments) + " segments");
  if (valid.size() != xv.rows())
    throw DimensionError("segment_max mask has " + std::to_string(valid.size()) +
                         " entries for " + std::to_string(xv.rows()) + " rows");
  const std::size_t len = xv.rows() / segments;
  const std::size_t cols = xv.cols();
  Tensor out = Tensor::zeros(segments, cols);
  std::vector<std::size_t> argmax(segments * cols);
  for (std::size_t s = 0; s < segments; ++s) {
    std::size_t first = len;
    for (std::size_t t = 0; t < len; ++t)
      if (valid[s * len + t]) {
        first = t;
        break;
      }
    if (first == len)
      throw EmptySequenceError("max over time: every position of sequence " + std::to_string(s) +
                               " is masked");
    for (std::size_t c = 0; c < cols; ++c) {
      std::size_t best = s * len + first;
      for (std::size_t t = first + 1; t < len; ++t) {
        const std::size_t r = s * len + t;
        if (valid[r] && xv.at(r, c) > xv.at(best, c)) best = r;
      }
      argmax[s * cols + c] = best;
      out.at(s, c) = xv.at(best, c);
    }
  }
  return push("segment_max", {x.id}, std::move(out),
              [argmax = std::move(argmax), cols](Graph& g, std::size_t self) {
                double* dx = g.grad_buffer(g.inputs(self)[0]);
                if (dx == nullptr) return;
                const double* dy = g.grad_buffer(self);
                for (std::size_t i = 0; i < argmax.size(); ++i)
                  dx[argmax[i] * cols + i % cols] += dy[i];
              });
}

void Graph::backward(Var loss) {
  check_owner(loss);
  if (value(loss).size() != 1)
    throw ContractError("backward needs a scalar loss, got " + shape_string(value(loss).shape()));
  if (backward_done_) throw ContractError("backward already ran on this graph");
  backward_done_ = true;
  if (!nodes_[loss.id].requires_grad) return;
  grad_buffer(loss.id)[0] += 1.0;
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.backward || (n.grad.empty() && n.param == nullptr)) continue;
    n.backward(*this, id);
  }
}

}  // namespace dgn
