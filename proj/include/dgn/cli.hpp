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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dgn/error.hpp"
#include "dgn/metrics.hpp"
#include "dgn/model.hpp"
#include "dgn/objective.hpp"
#include "dgn/train.hpp"

namespace dgn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct CommandPlan {
  std::string command;
  // Set instead of a command when --help was requested.
  std::string help_text;

  std::filesystem::path data, valid, test, out, model, predictions, patterns, score_table;

  // Vocabulary and charge counts are filled in once the data is loaded.
  model::DgnConfig model_config;
  train::TrainConfig train_config;
  std::uint64_t seed = 1;
  std::size_t min_count = 1;

  metrics::Level level = metrics::Level::kCharge;
  std::vector<double> ps = {0.1, 0.2};

  // gen-data
  std::size_t count = 1000;
  std::size_t min_charges = 1;
  std::size_t max_charges = 3;

  // sweep-depth / compare-loss
  std::vector<std::size_t> depths = {1, 2, 3, 4};
  std::vector<objective::LossKind> losses = {objective::LossKind::kLogHuber,
                                             objective::LossKind::kHuber,
                                             objective::LossKind::kMse,
                                             objective::LossKind::kMae};
};

// Throws UsageError on unknown flags, missing inputs or invalid settings.
CommandPlan parse_args(int argc, const char* const* argv);

// Executes a parsed plan. Failures flag written outputs with a `.partial`
// suffix and return kExitFailure.
int run(const CommandPlan& plan, std::ostream& out, std::ostream& err);

// parse_args + run with exit codes 0 (success), 1 (runtime failure) and 2
// (usage error).
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Per-component seeds derived from the single --seed flag.
enum SeedOffset : std::uint64_t { kSynthSeed = 1, kSplitSeed = 2, kInitSeed = 3, kShuffleSeed = 4 };

// Prediction CSV: case_id,charge,gold_months,pred_months.
void write_predictions(const std::filesystem::path& path,
                       std::span<const train::CasePrediction> rows);
std::vector<train::CasePrediction> read_predictions(const std::filesystem::path& path);

}  // namespace dgn::cli
