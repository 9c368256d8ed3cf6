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
#include <string_view>

// Dense double-precision inner loops. Every entry point has a portable
// scalar reference and, on x86-64, an AVX2+FMA variant chosen at startup.
//
// All matrices are row-major and contiguous. Each output element of the
// gemm kernels is accumulated over the shared extent in ascending order,
// so a row of the result depends only on the matching input row and the
// other operand, never on how many rows are processed together.

namespace dgn::kernels {

struct KernelTable {
  std::string_view name;

  // Returns sum_i a[i] * b[i].
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = a + b, out = a * b
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // out += a * b
  void (*mul_acc)(const double* a, const double* b, double* out, std::size_t n);

  // C[m x n] += A[m x k] * B[k x n]
  void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n);
  // C[m x n] += A[m x k] * B[n x k]^T
  void (*gemm_nt)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n);
  // C[k x n] += A[m x k]^T * B[m x n]
  void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the binary or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// Table used by the tensor engine. Picks AVX2 when available unless the
// environment variable DGN_KERNELS is set to "scalar".
const KernelTable& active();

// Overrides the active table; intended for tests and benchmarks. Not safe to
// call while another thread is running kernels.
void set_active(const KernelTable& table);

}  // namespace dgn::kernels
