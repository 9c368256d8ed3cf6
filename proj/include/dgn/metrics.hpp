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
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dgn::metrics {

// Piecewise-constant score over the log delta: the first bucket whose
// threshold is >= delta supplies the score, anything past the last threshold
// scores 0. Thresholds strictly increase and scores strictly decrease.
struct ScoreTable {
  std::vector<std::pair<double, double>> buckets;  // (threshold, score)

  // Five-bucket ladder: 0.2 -> 1.0, 0.4 -> 0.8, 0.6 -> 0.6, 0.8 -> 0.4, 1.0 -> 0.2.
  static ScoreTable standard();
  // Text file, one "threshold score" pair per line (comma or whitespace
  // separated, '#' starts a comment).
  static ScoreTable load(const std::filesystem::path& path);

  void validate() const;
};

enum class Level { kCharge, kTotal };

std::string level_name(Level level);
Level parse_level(const std::string& name);

struct Prediction {
  double gold = 0.0;
  double predicted = 0.0;
};

// Score in [0, 1] for one prediction.
double s_score(double gold, double predicted, const ScoreTable& table = ScoreTable::standard());
// The prediction rounds to the integer gold term; a prediction exactly half
// a month away counts as a match.
bool exact_match(double gold, double predicted);
// gold (1 - p) <= predicted <= gold (1 + p), on the unrounded prediction.
bool acc_at_p(double gold, double predicted, double p);

struct EvalReport {
  Level level = Level::kCharge;
  double s = 0.0;   // percent
  double em = 0.0;  // percent
  std::vector<std::pair<double, double>> acc;  // (p, percent)
  std::size_t n = 0;

  // Percentage for tolerance p; throws ContractError when p was not requested.
  double acc_at(double p) const;

  // "name=value" lines with two decimals.
  std::string to_text() const;
  // "level,metric,value,n" rows; the header is emitted by csv_header().
  std::string to_csv_rows() const;
  static std::string csv_header() { return "level,metric,value,n\n"; }

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Micro average: every prediction counts once. The result does not depend on
// the order of `predictions`.
EvalReport evaluate(std::span<const Prediction> predictions, const ScoreTable& table,
                    std::span<const double> tolerances, Level level = Level::kCharge);

// Macro average over groups (for example the charges of one case): each
// group's mean counts once. `groups[i]` labels predictions[i].
EvalReport evaluate_grouped(std::span<const Prediction> predictions,
                            std::span<const std::string> groups, const ScoreTable& table,
                            std::span<const double> tolerances, Level level = Level::kCharge);

std::string format_tolerance(double p);

}  // namespace dgn::metrics
