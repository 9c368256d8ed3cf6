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

#include <span>
#include <string>
#include <string_view>

#include "dgn/graph.hpp"

// Training objective on log-scale term deltas and the rule that folds
// per-charge terms into one total term.

namespace dgn::objective {

struct LossConfig {
  double a = 1.0;  // Huber threshold

  void validate() const;
};

struct TermCap {
  double cap = 240.0;  // months

  void validate() const;
};

// kLogHuber is the training objective; the others exist for the loss
// comparison harness and act on raw months.
enum class LossKind { kLogHuber, kHuber, kMse, kMae };

std::string_view loss_name(LossKind kind);
LossKind parse_loss(std::string_view name);

// |ln(y + 1) - ln(y_hat + 1)|. Throws DomainError for negative inputs.
double log_delta(double gold, double predicted);

// 0.5 d^2 below the threshold, a (d - 0.5 a) at or above it.
double huber(double delta, const LossConfig& config = {});

// Sum of huber(log_delta) over the charges of one case.
double case_loss(std::span<const double> gold, std::span<const double> predicted,
                 const LossConfig& config = {});

// min(cap, (max + sum) / 2) over per-charge predictions.
double total_term(std::span<const double> predicted, const TermCap& cap = {});

// Single-instance loss and its derivative with respect to the prediction.
// The derivative at a zero residual is 0.
double instance_loss(LossKind kind, double gold, double predicted, const LossConfig& config = {});
double instance_loss_grad(LossKind kind, double gold, double predicted,
                          const LossConfig& config = {});

// Graph node holding sum_i loss(gold[i], predictions[i]) for a B x 1 column
// of predictions.
Var loss_node(Graph& graph, Var predictions, std::span<const double> gold, LossKind kind,
              const LossConfig& config = {});

}  // namespace dgn::objective
