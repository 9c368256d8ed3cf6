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

#include "dgn/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "dgn/error.hpp"
#include "dgn/objective.hpp"

namespace dgn::metrics {

ScoreTable ScoreTable::standard() {
  return ScoreTable{{{0.2, 1.0}, {0.4, 0.8}, {0.6, 0.6}, {0.8, 0.4}, {1.0, 0.2}}};
}

void ScoreTable::validate() const {
  if (buckets.empty()) throw ConfigError("score table has no buckets");
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    const auto [threshold, score] = buckets[i];
    if (!std::isfinite(threshold) || threshold < 0.0)
      throw ConfigError("score table threshold must be finite and nonnegative");
    if (!(score >= 0.0 && score <= 1.0)) throw ConfigError("score table scores must lie in [0,1]");
    if (i > 0 && !(threshold > buckets[i - 1].first))
      throw ConfigError("score table thresholds must strictly increase");
    if (i > 0 && !(score < buckets[i - 1].second))
      throw ConfigError("score table scores must strictly decrease");
  }
}

ScoreTable ScoreTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open score table " + path.string());
  ScoreTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream fields(line);
    double threshold = 0.0, score = 0.0;
    if (!(fields >> threshold)) continue;
    if (!(fields >> score)) throw ConfigError("score table line lacks a score: " + line);
    table.buckets.emplace_back(threshold, score);
  }
  table.validate();
  return table;
}

std::string level_name(Level level) { return level == Level::kCharge ? "charge" : "total"; }

Level parse_level(const std::string& name) {
  if (name == "charge") return Level::kCharge;
  if (name == "total") return Level::kTotal;
  throw ConfigError("unknown level '" + name + "' (expected charge or total)");
}

namespace {

// Index of the bucket that scores this prediction, or buckets.size() for 0.
std::size_t bucket_of(double gold, double predicted, const ScoreTable& table) {
  const double delta = objective::log_delta(gold, predicted);
  for (std::size_t i = 0; i < table.buckets.size(); ++i)
    if (delta <= table.buckets[i].first) return i;
  return table.buckets.size();
}

// Integer tallies so that merging partial results is exact.
struct Tally {
  std::vector<std::size_t> buckets;
  std::size_t exact = 0;
  std::vector<std::size_t> within;
  std::size_t n = 0;
};

Tally tally(std::span<const Prediction> predictions, const ScoreTable& table,
            std::span<const double> tolerances) {
  Tally t;
  t.buckets.assign(table.buckets.size() + 1, 0);
  t.within.assign(tolerances.size(), 0);
  for (const Prediction& pr : predictions) {
    ++t.buckets[bucket_of(pr.gold, pr.predicted, table)];
    if (exact_match(pr.gold, pr.predicted)) ++t.exact;
    for (std::size_t k = 0; k < tolerances.size(); ++k)
      if (acc_at_p(pr.gold, pr.predicted, tolerances[k])) ++t.within[k];
    ++t.n;
  }
  return t;
}

double score_sum(const Tally& t, const ScoreTable& table) {
  double s = 0.0;
  for (std::size_t i = 0; i < table.buckets.size(); ++i)
    s += static_cast<double>(t.buckets[i]) * table.buckets[i].second;
  return s;
}

void check_tolerances(std::span<const double> tolerances) {
  for (double p : tolerances)
    if (!(p >= 0.0)) throw ConfigError("tolerance p must be nonnegative");
}

std::string two_decimals(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

double s_score(double gold, double predicted, const ScoreTable& table) {
  table.validate();
  const std::size_t b = bucket_of(gold, predicted, table);
  return b < table.buckets.size() ? table.buckets[b].second : 0.0;
}

// Half-month ties count as a match for the gold term.
bool exact_match(double gold, double predicted) { return std::abs(predicted - gold) <= 0.5; }

bool acc_at_p(double gold, double predicted, double p) {
  return gold * (1.0 - p) <= predicted && predicted <= gold * (1.0 + p);
}

double EvalReport::acc_at(double p) const {
  for (const auto& [tol, pct] : acc)
    if (tol == p) return pct;
  throw ContractError("report has no Acc@" + format_tolerance(p));
}

std::string format_tolerance(double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

std::string EvalReport::to_text() const {
  std::string out = "S=" + two_decimals(s) + "\nEM=" + two_decimals(em) + "\n";
  for (const auto& [p, pct] : acc) out += "Acc@" + format_tolerance(p) + "=" + two_decimals(pct) + "\n";
  return out;
}

std::string EvalReport::to_csv_rows() const {
  const std::string prefix = level_name(level) + ",";
  const std::string suffix = "," + std::to_string(n) + "\n";
  std::string out = prefix + "S," + two_decimals(s) + suffix;
  out += prefix + "EM," + two_decimals(em) + suffix;
  for (const auto& [p, pct] : acc)
    out += prefix + "Acc@" + format_tolerance(p) + "," + two_decimals(pct) + suffix;
  return out;
}

EvalReport evaluate(std::span<const Prediction> predictions, const ScoreTable& table,
                    std::span<const double> tolerances, Level level) {
  if (predictions.empty()) throw ContractError("evaluate needs at least one prediction");
  table.validate();
  check_tolerances(tolerances);
  const Tally t = tally(predictions, table, tolerances);
  const double n = static_cast<double>(t.n);
  EvalReport r;
  r.level = level;
  r.n = t.n;
  r.s = score_sum(t, table) / n * 100.0;
  r.em = static_cast<double>(t.exact) / n * 100.0;
  for (std::size_t k = 0; k < tolerances.size(); ++k)
    r.acc.emplace_back(tolerances[k], static_cast<double>(t.within[k]) / n * 100.0);
  return r;
}

EvalReport evaluate_grouped(std::span<const Prediction> predictions,
                            std::span<const std::string> groups, const ScoreTable& table,
                            std::span<const double> tolerances, Level level) {
  if (predictions.empty()) throw ContractError("evaluate needs at least one prediction");
  if (groups.size() != predictions.size())
    throw ContractError("evaluate_grouped: one group label per prediction required");
  table.validate();
  check_tolerances(tolerances);
  std::map<std::string, std::vector<Prediction>> by_group;
  for (std::size_t i = 0; i < predictions.size(); ++i) by_group[groups[i]].push_back(predictions[i]);

  EvalReport r;
  r.level = level;
  r.n = predictions.size();
  std::vector<double> acc(tolerances.size(), 0.0);
  for (const auto& [name, members] : by_group) {
    const Tally t = tally(members, table, tolerances);
    const double n = static_cast<double>(t.n);
    r.s += score_sum(t, table) / n;
    r.em += static_cast<double>(t.exact) / n;
    for (std::size_t k = 0; k < tolerances.size(); ++k)
      acc[k] += static_cast<double>(t.within[k]) / n;
  }
  const double g = static_cast<double>(by_group.size());
  r.s = r.s / g * 100.0;
  r.em = r.em / g * 100.0;
  for (std::size_t k = 0; k < tolerances.size(); ++k)
    r.acc.emplace_back(tolerances[k], acc[k] / g * 100.0);
  return r;
}

}  // namespace dgn::metrics
