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

#include "dgn/graph.hpp"

namespace dgn {

// Builds a fresh graph and returns its scalar output. Must be deterministic.
using ScalarFunction = std::function<Var(Graph&)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_parameter = 0;
  std::size_t worst_index = 0;
  std::size_t coordinates = 0;
};

// Compares backward() against central differences on every coordinate of
// `params`. The relative error per coordinate is
//   |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
// Throws DeterminismError when two baseline evaluations differ and
// ContractError for a non-positive step.
GradCheckResult grad_check(const ScalarFunction& f, std::span<Parameter* const> params,
                           double eps);

}  // namespace dgn
