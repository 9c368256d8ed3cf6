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
#include <numbers>
#include <random>
#include <string>

#include "dgn/error.hpp"
#include "dgn/grad_check.hpp"
#include "dgn/graph.hpp"

namespace dgn {
namespace {

Tensor random_tensor(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = -1.0,
                     double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t = Tensor::zeros(rows, cols);
  for (double& v : t.values()) v = dist(rng);
  return t;
}

TEST(Tensor, RejectsBadShapes) {
  EXPECT_THROW(Tensor({2, 0}), DimensionError);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
  EXPECT_EQ(Tensor({3}).rows(), 1u);
  EXPECT_EQ(Tensor({3}).cols(), 3u);
}

TEST(Matmul, IdentityAndHandProduct) {
  Graph g;
  Var a = g.constant(Tensor::matrix(2, 2, {1, 2, 3, 4}));
  Var id = g.constant(Tensor::matrix(2, 2, {1, 0, 0, 1}));
  EXPECT_EQ(g.matmul(a, id).value(), Tensor::matrix(2, 2, {1, 2, 3, 4}));

  Var row = g.constant(Tensor::matrix(1, 2, {1, 2}));
  Var col = g.constant(Tensor::matrix(2, 1, {3, 4}));
  EXPECT_EQ(g.matmul(row, col).value()[0], 11.0);
}

TEST(Matmul, ShapeMismatchNamesBothShapes) {
  Graph g;
  Var a = g.constant(Tensor::zeros(2, 3));
  Var b = g.constant(Tensor::zeros(2, 3));
  try {
    g.matmul(a, b);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3] x [2x3]"), std::string::npos) << msg;
  }
}

TEST(Matmul, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(3);
  Parameter a("a", random_tensor(3, 4, rng));
  Parameter b("b", random_tensor(4, 2, rng));
  Parameter w("w", random_tensor(3, 2, rng));
  auto f = [&](Graph& g) { return g.sum(g.mul(g.matmul(g.param(a), g.param(b)), g.param(w))); };
  Parameter* params[] = {&a, &b, &w};
  EXPECT_LT(grad_check(f, params, 1e-5).max_relative_error, 1e-6);
}

TEST(Elementwise, SpotValues) {
  Graph g;
  EXPECT_EQ(g.sigmoid(g.constant(Tensor::scalar(0.0))).value()[0], 0.5);
  EXPECT_NEAR(g.log1p(g.constant(Tensor::scalar(std::numbers::e - 1.0))).value()[0], 1.0, 1e-15);
  EXPECT_THROW(g.log1p(g.constant(Tensor::scalar(-0.5))), DomainError);
}

TEST(Elementwise, ReluDeadRegion) {
  Graph g;
  Var x = g.input(Tensor::scalar(-2.0));
  Var y = g.relu(x);
  EXPECT_EQ(y.value()[0], 0.0);
  g.backward(y);
  EXPECT_EQ(g.grad(x)[0], 0.0);
}

TEST(Elementwise, BinaryShapeRules) {
  Graph g;
  Var a = g.constant(Tensor::zeros(2, 3));
  Var b = g.constant(Tensor::zeros(3, 2));
  EXPECT_THROW(g.add(a, b), DimensionError);
  Var s = g.constant(Tensor::scalar(2.0));
  Var m = g.mul(s, g.constant(Tensor::matrix(1, 3, {1, 2, 3})));
  EXPECT_EQ(m.value(), Tensor::matrix(1, 3, {2, 4, 6}));
}

TEST(Elementwise, NonFiniteValuesAreRejectedAtOpBoundaries) {
  Graph g;
  EXPECT_THROW(g.constant(Tensor::scalar(std::nan(""))), NumericError);
  Var big = g.constant(Tensor::scalar(1e300));
  EXPECT_THROW(g.mul(big, big), NumericError);
}

// One finite-difference property test per differentiable op kind, on random
// small inputs, at relative tolerance 1e-5.
class OpGradient : public ::testing::TestWithParam<std::string> {};

TEST_P(OpGradient, MatchesCentralDifferences) {
  const std::string op = GetParam();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed * 31 + op.size());
    // Keep log1p inputs positive and relu inputs away from the kink.
    const bool positive = op == "log1p";
    Parameter x("x", random_tensor(4, 3, rng, positive ? 0.1 : -1.0, 1.0));
    if (op == "relu")
      for (double& v : x.value.values())
        if (std::abs(v) < 0.05) v = 0.3;
    Parameter y("y", random_tensor(4, 3, rng));
    Parameter w("w", random_tensor(4, 3, rng));
    Parameter s("s", random_tensor(1, 1, rng));
    Parameter t("t", random_tensor(2, 3, rng));

    auto f = [&](Graph& g) -> Var {
      Var vx = g.param(x), vy = g.param(y);
      Var out;
      if (op == "sigmoid") out = g.sigmoid(vx);
      else if (op == "tanh") out = g.tanh(vx);
      else if (op == "relu") out = g.relu(vx);
      else if (op == "log1p") out = g.log1p(vx);
      else if (op == "add") out = g.add(vx, vy);
      else if (op == "sub") out = g.sub(vx, vy);
      else if (op == "mul") out = g.mul(vx, vy);
      else if (op == "scalar_mul") out = g.mul(g.param(s), vx);
      else if (op == "scale") out = g.scale(vx, -1.7);
      else if (op == "concat") {
        Var parts[] = {vx, vy};
        out = g.slice_cols(g.concat_cols(parts), 2, 3);
        Var rows[] = {out, vx};
        out = g.slice_rows(g.concat_rows(rows), 2, 4);
      } else if (op == "repeat") out = g.slice_rows(g.repeat_rows(g.param(t), 2), 0, 4);
      else if (op == "gather") {
        const std::size_t idx[] = {3, 0, 3, 1};
        out = g.gather_rows(vx, idx);
      } else if (op == "where") {
        const char keep[] = {1, 0, 0, 1};
        out = g.where_rows(keep, vx, vy);
      } else if (op == "mask") {
        const char keep[] = {0, 1, 1, 0};
        out = g.mask_rows(vx, keep);
      } else if (op == "window") {
        // Two sequences, two steps each, width 2 -> 2 rows of 6.
        out = g.slice_cols(g.window_rows(vx, 2, 2, 2), 0, 3);
        out = g.concat_rows(std::vector<Var>{out, out});
      } else if (op == "segment_max") {
        const char valid[] = {1, 1, 0, 1};
        out = g.segment_max(vx, 2, valid);
        out = g.concat_rows(std::vector<Var>{out, out});
      }
      return g.sum(g.mul(out, g.param(w)));
    };
    Parameter* params[] = {&x, &y, &s, &t, &w};
    EXPECT_LT(grad_check(f, params, 1e-6).max_relative_error, 1e-5) << op << " seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(AllOps, OpGradient,
                         ::testing::Values("sigmoid", "tanh", "relu", "log1p", "add", "sub",
                                           "mul", "scalar_mul", "scale", "concat", "repeat",
                                           "gather", "where", "mask", "window", "segment_max"));

TEST(MaxOverTime, UnmaskedAndMasked) {
  Graph g;
  Var x = g.constant(Tensor::matrix(3, 1, {1, 5, 3}));
  const char all[] = {1, 1, 1};
  EXPECT_EQ(g.max_over_time(x, all).value()[0], 5.0);
  const char skip_middle[] = {1, 0, 1};
  EXPECT_EQ(g.max_over_time(x, skip_middle).value()[0], 3.0);
  const char none[] = {0, 0, 0};
  EXPECT_THROW(g.max_over_time(x, none), EmptySequenceError);
}

TEST(MaxOverTime, GradientRoutesOneOnePerChannelFirstTieWins) {
  Graph g;
  Var x = g.input(Tensor::matrix(3, 2, {4, 1, 4, 7, 2, 7}));
  const char all[] = {1, 1, 1};
  g.backward(g.sum(g.max_over_time(x, all)));
  const auto grad = g.grad(x);
  EXPECT_EQ(std::vector<double>(grad.begin(), grad.end()),
            (std::vector<double>{1, 0, 0, 1, 0, 0}));
}

TEST(Backward, SquareAndSigmoid) {
  {
    Graph g;
    Var x = g.input(Tensor::scalar(3.0));
    g.backward(g.mul(x, x));
    EXPECT_EQ(g.grad(x)[0], 6.0);
  }
  {
    Graph g;
    Var x = g.input(Tensor::scalar(0.0));
    g.backward(g.sigmoid(x));
    EXPECT_EQ(g.grad(x)[0], 0.25);
  }
}

TEST(Backward, NonScalarLossIsAContractError) {
  Graph g;
  Var x = g.input(Tensor::zeros(2, 2));
  EXPECT_THROW(g.backward(x), ContractError);
}

TEST(Backward, UnreachableParameterGetsExactlyZero) {
  std::mt19937_64 rng(11);
  Parameter used("used", random_tensor(2, 2, rng));
  Parameter ignored("ignored", random_tensor(2, 2, rng));
  ignored.grad.fill(0.0);
  Graph g;
  Var u = g.param(used);
  Var i = g.param(ignored);
  (void)g.tanh(i);  // on the tape, but not part of the loss
  g.backward(g.sum(g.sigmoid(u)));
  for (double v : ignored.grad.values()) EXPECT_EQ(v, 0.0);
  for (double v : used.grad.values()) EXPECT_NE(v, 0.0);
}

TEST(Frozen, ReadsParameterWithoutTouchingItsGradient) {
  std::mt19937_64 rng(12);
  Parameter w("w", random_tensor(2, 2, rng));
  Parameter x("x", random_tensor(1, 2, rng));
  w.zero_grad();
  x.zero_grad();
  Graph tracked;
  const Tensor expected = tracked.matmul(tracked.param(x), tracked.param(w)).value();
  Graph g;
  Var out = g.matmul(g.param(x), g.frozen(w));
  EXPECT_EQ(out.value(), expected);
  EXPECT_FALSE(g.requires_grad(g.frozen(w).id));
  g.backward(g.sum(out));
  for (double v : w.grad.values()) EXPECT_EQ(v, 0.0);
  EXPECT_NE(x.grad[0], 0.0);
}

TEST(Backward, VisitsTapeInReverseInsertionOrder) {
  Graph g;
  Var x = g.input(Tensor::scalar(0.5));
  Var y = g.tanh(x);
  Var z = g.mul(y, x);
  for (std::size_t id = 0; id < g.size(); ++id)
    for (std::size_t in : g.inputs(id)) EXPECT_LT(in, id);
  g.backward(z);
  const double t = std::tanh(0.5);
  EXPECT_NEAR(g.grad(x)[0], t + 0.5 * (1 - t * t), 1e-15);
}

TEST(Forward, IsBitDeterministic) {
  std::mt19937_64 rng(5);
  Parameter a("a", random_tensor(5, 7, rng));
  Parameter b("b", random_tensor(7, 3, rng));
  auto run = [&] {
    Graph g;
    return g.tanh(g.matmul(g.param(a), g.param(b))).value();
  };
  EXPECT_EQ(run(), run());
}

TEST(GradCheck, QuadraticAndConstant) {
  std::mt19937_64 rng(9);
  Parameter theta("theta", random_tensor(3, 3, rng));
  Parameter* params[] = {&theta};
  auto square = [&](Graph& g) {
    Var t = g.param(theta);
    return g.sum(g.mul(t, t));
  };
  EXPECT_LT(grad_check(square, params, 1e-5).max_relative_error, 1e-6);
  EXPECT_EQ(grad_check(square, params, 1e-5).coordinates, 9u);

  auto constant = [&](Graph& g) {
    (void)g.param(theta);
    return g.constant(Tensor::scalar(4.0));
  };
  EXPECT_EQ(grad_check(constant, params, 1e-5).max_relative_error, 0.0);
}

TEST(GradCheck, RejectsNondeterministicFunctionAndBadStep) {
  Parameter theta("theta", Tensor::scalar(1.0));
  Parameter* params[] = {&theta};
  int calls = 0;
  auto drifting = [&](Graph& g) {
    return g.add(g.param(theta), g.constant(Tensor::scalar(++calls)));
  };
  EXPECT_THROW(grad_check(drifting, params, 1e-5), DeterminismError);
  auto fine = [&](Graph& g) { return g.param(theta); };
  EXPECT_THROW(grad_check(fine, params, 0.0), ContractError);
}

}  // namespace
}  // namespace dgn
