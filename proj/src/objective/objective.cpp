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

#include "dgn/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "dgn/error.hpp"

namespace dgn::objective {

void LossConfig::validate() const {
  if (!(a > 0.0)) throw ConfigError("Huber threshold must be positive");
}

void TermCap::validate() const {
  if (!(cap > 0.0)) throw ConfigError("term cap must be positive");
}

std::string_view loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::kLogHuber: return "lhl";
    case LossKind::kHuber: return "hl";
    case LossKind::kMse: return "mse";
    case LossKind::kMae: return "mae";
  }
  return "?";
}

LossKind parse_loss(std::string_view name) {
  for (LossKind k : {LossKind::kLogHuber, LossKind::kHuber, LossKind::kMse, LossKind::kMae})
    if (loss_name(k) == name) return k;
  throw ConfigError("unknown loss '" + std::string(name) + "' (expected lhl, hl, mse or mae)");
}

double log_delta(double gold, double predicted) {
  if (gold < 0.0 || predicted < 0.0)
    throw DomainError("log_delta needs nonnegative terms, got " + std::to_string(gold) + " and " +
                      std::to_string(predicted));
  return std::abs(std::log1p(gold) - std::log1p(predicted));
}

double huber(double delta, const LossConfig& config) {
  const double a = config.a;
  return delta < a ? 0.5 * delta * delta : a * (delta - 0.5 * a);
}

double case_loss(std::span<const double> gold, std::span<const double> predicted,
                 const LossConfig& config) {
  if (gold.size() != predicted.size())
    throw ContractError("case_loss: " + std::to_string(predicted.size()) +
                        " predictions for " + std::to_string(gold.size()) + " charges");
  double total = 0.0;
  for (std::size_t j = 0; j < gold.size(); ++j)
    total += huber(log_delta(gold[j], predicted[j]), config);
  return total;
}

double total_term(std::span<const double> predicted, const TermCap& cap) {
  if (predicted.empty()) throw ContractError("total_term needs at least one prediction");
  for (double v : predicted)
    if (v < 0.0) throw DomainError("total_term: negative prediction " + std::to_string(v));
  // Sum in sorted order so the result is exactly permutation-invariant.
  std::vector<double> sorted(predicted.begin(), predicted.end());
  std::sort(sorted.begin(), sorted.end());
  const double largest = sorted.back();
  const double sum = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  return std::min(cap.cap, (largest + sum) / 2.0);
}

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Derivative of huber with respect to a signed residual r (delta = |r|).
double huber_slope(double r, double a) {
  return std::abs(r) < a ? r : a * sign(r);
}

}  // namespace

double instance_loss(LossKind kind, double gold, double predicted, const LossConfig& config) {
  switch (kind) {
    case LossKind::kLogHuber: return huber(log_delta(gold, predicted), config);
    case LossKind::kHuber: return huber(std::abs(predicted - gold), config);
    case LossKind::kMse: return (predicted - gold) * (predicted - gold);
    case LossKind::kMae: return std::abs(predicted - gold);
  }
  return 0.0;
}

double instance_loss_grad(LossKind kind, double gold, double predicted,
                          const LossConfig& config) {
  const double r = predicted - gold;
  switch (kind) {
    case LossKind::kLogHuber: {
      if (gold < 0.0 || predicted < 0.0) throw DomainError("log-Huber loss needs nonnegative terms");
      const double lr = std::log1p(predicted) - std::log1p(gold);
      return huber_slope(lr, config.a) / (predicted + 1.0);
    }
    case LossKind::kHuber: return huber_slope(r, config.a);
    case LossKind::kMse: return 2.0 * r;
    case LossKind::kMae: return sign(r);
  }
  return 0.0;
}

Var loss_node(Graph& graph, Var predictions, std::span<const double> gold, LossKind kind,
              const LossConfig& config) {
  config.validate();
  const Tensor& p = predictions.value();
  if (p.cols() != 1 || p.rows() != gold.size())
    throw DimensionError("loss: predictions " + shape_string(p.shape()) + " for " +
                         std::to_string(gold.size()) + " gold terms");
  double total = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) total += instance_loss(kind, gold[i], p[i], config);
  return graph.custom(
      "loss", {predictions.id}, Tensor::scalar(total),
      [kind, config, gold = std::vector<double>(gold.begin(), gold.end())](Graph& g,
                                                                         std::size_t self) {
        const std::size_t in = g.inputs(self)[0];
        double* dp = g.grad_buffer(in);
        if (dp == nullptr) return;
        const double upstream = g.grad_buffer(self)[0];
        const Tensor& pv = g.value(in);
        for (std::size_t i = 0; i < gold.size(); ++i)
          dp[i] += upstream * instance_loss_grad(kind, gold[i], pv[i], config);
      });
}

}  // namespace dgn::objective
