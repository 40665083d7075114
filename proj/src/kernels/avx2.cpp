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

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "tables.hpp"

namespace ptcb::kernels::detail {
namespace {

inline double HorizontalSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double Dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void MatVec(const double* m, const double* x, double* y, std::size_t rows,
            std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = Dot(m + r * cols, x, cols);
}

// Row-broadcast update: out[0..cols) += s * row[0..cols).
inline void ScaledRowAdd(double s, const double* row, double* out,
                         std::size_t cols) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t j = 0;
  for (; j + 4 <= cols; j += 4) {
    _mm256_storeu_pd(out + j, _mm256_fmadd_pd(sv, _mm256_loadu_pd(row + j),
                                              _mm256_loadu_pd(out + j)));
  }
  for (; j < cols; ++j) out[j] += s * row[j];
}

void VecMat(const double* x, const double* m, double* y, std::size_t rows,
            std::size_t cols) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) ScaledRowAdd(x[r], m + r * cols, y, cols);
}

void MatMul(const double* a, const double* b, double* c, std::size_t rows,
            std::size_t inner, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* out = c + i * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
    for (std::size_t k = 0; k < inner; ++k) {
      const double aik = a[i * inner + k];
      if (aik == 0.0) continue;
      ScaledRowAdd(aik, b + k * cols, out, cols);
    }
  }
}

void Hadamard(const double* a, const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i,
                     _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) y[i] = a[i] * x[i];
}

void Axpy(double alpha, const double* x, double* y, std::size_t n) {
  ScaledRowAdd(alpha, x, y, n);
}

}  // namespace

const KernelTable kAvx2{"avx2", Dot, MatVec, VecMat, MatMul, Hadamard, Axpy};

}  // namespace ptcb::kernels::detail
