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
#include <random>
#include <vector>

#include "dgn/kernels.hpp"

namespace dgn::kernels {
namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

void expect_close(const std::vector<double>& a, const std::vector<double>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_NEAR(a[i], b[i], 1e-12 * (1.0 + std::abs(a[i]))) << "index " << i;
}

class KernelEquivalence : public ::testing::TestWithParam<std::size_t> {
 protected:
  void SetUp() override {
    fast_ = avx2_table();
    if (fast_ == nullptr) GTEST_SKIP() << "AVX2/FMA unavailable on this CPU";
  }
  const KernelTable* fast_ = nullptr;
  const KernelTable& ref_ = scalar_table();
};

TEST_P(KernelEquivalence, VectorKernelsMatchScalar) {
  const std::size_t n = GetParam();
  std::mt19937_64 rng(n);
  auto a = random_vector(n, rng), b = random_vector(n, rng), y = random_vector(n, rng);

  EXPECT_NEAR(ref_.dot(a.data(), b.data(), n), fast_->dot(a.data(), b.data(), n), 1e-12 * (n + 1));

  auto y_ref = y, y_fast = y;
  ref_.axpy(0.75, a.data(), y_ref.data(), n);
  fast_->axpy(0.75, a.data(), y_fast.data(), n);
  expect_close(y_ref, y_fast);

  std::vector<double> o_ref(n), o_fast(n);
  ref_.add(a.data(), b.data(), o_ref.data(), n);
  fast_->add(a.data(), b.data(), o_fast.data(), n);
  EXPECT_EQ(o_ref, o_fast);
  ref_.mul(a.data(), b.data(), o_ref.data(), n);
  fast_->mul(a.data(), b.data(), o_fast.data(), n);
  EXPECT_EQ(o_ref, o_fast);

  y_ref = y;
  y_fast = y;
  ref_.mul_acc(a.data(), b.data(), y_ref.data(), n);
  fast_->mul_acc(a.data(), b.data(), y_fast.data(), n);
  expect_close(y_ref, y_fast);
}

TEST_P(KernelEquivalence, GemmVariantsMatchScalar) {
  const std::size_t n = GetParam();
  const std::size_t m = 3 + n % 4, k = 1 + n / 2;
  std::mt19937_64 rng(100 + n);
  auto a = random_vector(m * k, rng);
  auto b = random_vector(k * n, rng);
  auto bt = random_vector(n * k, rng);
  auto g = random_vector(m * n, rng);
  auto c0 = random_vector(m * n, rng);

  auto c_ref = c0, c_fast = c0;
  ref_.gemm_nn(a.data(), b.data(), c_ref.data(), m, k, n);
  fast_->gemm_nn(a.data(), b.data(), c_fast.data(), m, k, n);
  expect_close(c_ref, c_fast);

  c_ref = c0;
  c_fast = c0;
  ref_.gemm_nt(a.data(), bt.data(), c_ref.data(), m, k, n);
  fast_->gemm_nt(a.data(), bt.data(), c_fast.data(), m, k, n);
  expect_close(c_ref, c_fast);

  std::vector<double> t_ref(k * n, 0.5), t_fast(k * n, 0.5);
  ref_.gemm_tn(a.data(), g.data(), t_ref.data(), m, k, n);
  fast_->gemm_tn(a.data(), g.data(), t_fast.data(), m, k, n);
  expect_close(t_ref, t_fast);
}

INSTANTIATE_TEST_SUITE_P(Lengths, KernelEquivalence,
                         ::testing::Values(1, 3, 4, 5, 7, 8, 15, 16, 17, 33, 64, 129));

// A row of a product must not depend on how many rows are computed together;
// masking and batching rely on this being bit-exact.
TEST(Kernels, GemmRowsAreIndependentOfBatchSize) {
  std::mt19937_64 rng(7);
  const std::size_t m = 6, k = 19, n = 37;
  auto a = random_vector(m * k, rng), b = random_vector(k * n, rng);
  for (const KernelTable* table : {&scalar_table(), avx2_table()}) {
    if (table == nullptr) continue;
    std::vector<double> full(m * n, 0.0);
    table->gemm_nn(a.data(), b.data(), full.data(), m, k, n);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> row(n, 0.0);
      table->gemm_nn(a.data() + i * k, b.data(), row.data(), 1, k, n);
      for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(row[j], full[i * n + j]) << table->name;
    }
  }
}

TEST(Kernels, GemmSmallHandProduct) {
  const double a[] = {1, 2, 3, 4};
  const double b[] = {5, 6, 7, 8};
  double c[4] = {};
  scalar_table().gemm_nn(a, b, c, 2, 2, 2);
  EXPECT_DOUBLE_EQ(c[0], 19);
  EXPECT_DOUBLE_EQ(c[1], 22);
  EXPECT_DOUBLE_EQ(c[2], 43);
  EXPECT_DOUBLE_EQ(c[3], 50);
}

TEST(Kernels, SetActiveSwitchesTable) {
  const KernelTable& before = active();
  set_active(scalar_table());
  EXPECT_EQ(active().name, "scalar");
  set_active(before);
  EXPECT_EQ(&active(), &before);
}

}  // namespace
}  // namespace dgn::kernels
