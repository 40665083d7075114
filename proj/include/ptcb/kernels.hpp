// Copyright 2026 The PTCB Authors
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

// Dense real kernels behind every transfer-matrix operation. Each routine has
// a portable scalar reference and, on x86-64, an AVX2/FMA variant; the active
// table is picked once per process from CPU features and can be pinned with
// the PTCB_KERNELS environment variable ("scalar" or "avx2") or select().
//
// All matrices are dense row-major. Within one table every output entry is
// accumulated in a fixed order, so results never depend on threading.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ptcb::kernels {

struct KernelTable {
  const char* name;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y = M x, M is rows x cols.
  void (*matvec)(const double* m, const double* x, double* y, std::size_t rows,
                 std::size_t cols);
  /// y = x^T M, M is rows x cols, y has cols entries.
  void (*vecmat)(const double* x, const double* m, double* y, std::size_t rows,
                 std::size_t cols);
  /// C = A B with A rows x inner, B inner x cols.
  void (*matmul)(const double* a, const double* b, double* c, std::size_t rows,
                 std::size_t inner, std::size_t cols);
  /// y[i] = a[i] * x[i]
  void (*hadamard)(const double* a, const double* x, double* y, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();

/// nullptr when the binary was built without AVX2 or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

/// Table used by the library. Chosen on first use.
const KernelTable& active();

/// Pins the active table by name. Returns false if it is not available here.
bool select(std::string_view name);

std::vector<std::string> available();

}  // namespace ptcb::kernels
