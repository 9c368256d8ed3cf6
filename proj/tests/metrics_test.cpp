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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "dgn/error.hpp"
#include "dgn/metrics.hpp"

namespace dgn::metrics {
namespace {

const double kTolerances[] = {0.1, 0.2};

TEST(SScore, TabulatedValues) {
  EXPECT_EQ(s_score(100, 100), 1.0);
  // delta = ln(101/51) ~ 0.6833 lands in the (0.6, 0.8] bucket.
  EXPECT_NEAR(std::log(101.0 / 51.0), 0.6833, 1e-4);
  EXPECT_EQ(s_score(100, 50), 0.4);
  // delta = ln(101/21) ~ 1.57 is past the last threshold.
  EXPECT_EQ(s_score(100, 20), 0.0);
}

TEST(SScore, NonincreasingInDelta) {
  double prev = 1.0;
  for (double p = 50.0; p >= 0.0; p -= 0.25) {
    const double s = s_score(50.0, p);
    EXPECT_LE(s, prev);
    prev = s;
  }
  for (double y : {1.0, 7.0, 240.0}) EXPECT_EQ(s_score(y, y), 1.0);
}

TEST(ScoreTable, ValidationRejectsBadTables) {
  EXPECT_NO_THROW(ScoreTable::standard().validate());
  EXPECT_THROW((ScoreTable{{{0.2, 1.0}, {0.1, 0.5}}}.validate()), ConfigError);
  EXPECT_THROW((ScoreTable{{{0.2, 0.5}, {0.4, 0.8}}}.validate()), ConfigError);
  EXPECT_THROW((ScoreTable{{{0.2, 1.5}}}.validate()), ConfigError);
  EXPECT_THROW(ScoreTable{}.validate(), ConfigError);
  EXPECT_THROW(s_score(1, 1, ScoreTable{}), ConfigError);
}

TEST(ScoreTable, LoadsFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "dgn_score_table.txt";
  {
    std::ofstream out(path);
    out << "# custom\n0.1, 1.0\n0.5 0.5\n\n";
  }
  const ScoreTable t = ScoreTable::load(path);
  ASSERT_EQ(t.buckets.size(), 2u);
  EXPECT_EQ(t.buckets[1], (std::pair<double, double>{0.5, 0.5}));
  std::filesystem::remove(path);
  EXPECT_THROW(ScoreTable::load(path), ConfigError);
}

TEST(ExactMatch, RoundsHalfUp) {
  EXPECT_TRUE(exact_match(24, 24.4));
  EXPECT_FALSE(exact_match(24, 24.6));
  EXPECT_TRUE(exact_match(24, 24.5));
  EXPECT_TRUE(exact_match(25, 24.5));
  EXPECT_FALSE(exact_match(24, 23.4999));
}

TEST(AccAtP, InclusiveBoundsOnRawPrediction) {
  EXPECT_TRUE(acc_at_p(100, 120, 0.2));
  EXPECT_FALSE(acc_at_p(100, 120.01, 0.2));
  EXPECT_TRUE(acc_at_p(100, 80, 0.2));
  EXPECT_TRUE(acc_at_p(33, 33, 0.0));
  EXPECT_FALSE(acc_at_p(33, 33.0000001, 0.0));
}

TEST(AccAtP, MonotoneInTolerance) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> dist(0.0, 240.0);
  for (int i = 0; i < 2000; ++i) {
    const double y = std::floor(dist(rng)) + 1, p = dist(rng);
    for (double tol = 0.0; tol < 1.0; tol += 0.05)
      if (acc_at_p(y, p, tol)) {
        EXPECT_TRUE(acc_at_p(y, p, tol + 0.01));
      }
  }
}

TEST(ExactMatch, ImpliesAccuracyAtRoundingTolerance) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int y = 1; y <= 240; ++y)
    for (int i = 0; i < 20; ++i) {
      const double p = y - 0.5 + dist(rng) * (1.0 - 1e-12);
      if (exact_match(y, p)) {
        EXPECT_TRUE(acc_at_p(y, p, 0.5 / y)) << y << " " << p;
      }
    }
}

TEST(Evaluate, PerfectAndMixedPairs) {
  const std::vector<Prediction> perfect = {{12, 12}, {240, 240}, {1, 1}};
  const EvalReport r = evaluate(perfect, ScoreTable::standard(), kTolerances);
  EXPECT_EQ(r.s, 100.0);
  EXPECT_EQ(r.em, 100.0);
  EXPECT_EQ(r.acc_at(0.1), 100.0);
  EXPECT_EQ(r.acc_at(0.2), 100.0);
  EXPECT_EQ(r.n, 3u);

  const std::vector<Prediction> mixed = {{100, 100}, {100, 20}};
  EXPECT_EQ(evaluate(mixed, ScoreTable::standard(), kTolerances).s, 50.0);

  const std::vector<Prediction> single = {{10, 11}};
  const EvalReport one = evaluate(single, ScoreTable::standard(), kTolerances);
  EXPECT_EQ(one.acc_at(0.1), 100.0);
  EXPECT_EQ(one.em, 0.0);
  EXPECT_THROW(one.acc_at(0.3), ContractError);
}

TEST(Evaluate, EmptyInputIsAContractError) {
  EXPECT_THROW(evaluate({}, ScoreTable::standard(), kTolerances), ContractError);
}

TEST(Evaluate, IndependentOfOrderBitExact) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> dist(0.0, 240.0);
  std::vector<Prediction> preds;
  for (int i = 0; i < 777; ++i) preds.push_back({std::floor(dist(rng)) + 1, dist(rng)});
  const EvalReport base = evaluate(preds, ScoreTable::standard(), kTolerances);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(preds.begin(), preds.end(), rng);
    EXPECT_EQ(evaluate(preds, ScoreTable::standard(), kTolerances), base);
  }
}

TEST(Evaluate, GroupedMacroAverage) {
  const std::vector<Prediction> preds = {{100, 100}, {100, 20}, {50, 50}};
  const std::vector<std::string> groups = {"a", "a", "b"};
  const EvalReport r = evaluate_grouped(preds, groups, ScoreTable::standard(), kTolerances);
  // Case a scores 0.5, case b scores 1.0.
  EXPECT_DOUBLE_EQ(r.s, 75.0);
  EXPECT_EQ(r.n, 3u);
}

TEST(Report, TextAndCsvSerialization) {
  const std::vector<Prediction> mixed = {{100, 100}, {100, 20}, {100, 110}};
  const EvalReport r = evaluate(mixed, ScoreTable::standard(), kTolerances, Level::kTotal);
  EXPECT_EQ(r.to_text(), "S=66.67\nEM=33.33\nAcc@0.1=66.67\nAcc@0.2=66.67\n");
  EXPECT_EQ(EvalReport::csv_header() + r.to_csv_rows(),
            "level,metric,value,n\n"
            "total,S,66.67,3\n"
            "total,EM,33.33,3\n"
            "total,Acc@0.1,66.67,3\n"
            "total,Acc@0.2,66.67,3\n");
}

}  // namespace
}  // namespace dgn::metrics
