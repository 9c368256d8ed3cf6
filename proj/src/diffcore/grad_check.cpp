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

#include "dgn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dgn/error.hpp"

namespace dgn {
namespace {

double evaluate(const ScalarFunction& f) {
  Graph g;
  Var out = f(g);
  if (out.value().size() != 1) throw ContractError("grad_check function must return a scalar");
  return out.value()[0];
}

}  // namespace

GradCheckResult grad_check(const ScalarFunction& f, std::span<Parameter* const> params,
                           double eps) {
  if (!(eps > 0.0)) throw ContractError("grad_check step must be positive");

  const double base = evaluate(f);
  if (evaluate(f) != base)
    throw DeterminismError("grad_check: two evaluations at the same point differ");

  for (Parameter* p : params) p->zero_grad();
  {
    Graph g;
    Var out = f(g);
    g.backward(out);
  }
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (Parameter* p : params) analytic.emplace_back(p->grad.values().begin(), p->grad.values().end());

  GradCheckResult result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto values = params[k]->value.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double up = evaluate(f);
      values[i] = saved - eps;
      const double down = evaluate(f);
      values[i] = saved;

      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[k][i];
      const double err = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      if (err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_parameter = k;
        result.worst_index = i;
      }
      ++result.coordinates;
    }
  }
  return result;
}

}  // namespace dgn
