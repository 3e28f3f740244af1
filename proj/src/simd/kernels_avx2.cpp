/*
 * Copyright 2026 The qpu-time Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// AVX2 variants. This translation unit is the only one compiled with -mavx2;
// it is reached only through the dispatch table after a CPUID check.

#include <immintrin.h>

#include <cmath>

#include "qpt/simd/kernels.hpp"

namespace qpt::simd {

namespace {

inline double combine_lanes(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void subtract(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void quantile_gradient(const double* pred, const double* y, double alpha, double* out,
                       std::size_t n) {
  const double above = -alpha;
  const double below = 1.0 - alpha;
  const __m256d v_below = _mm256_set1_pd(below);
  const __m256d v_above = _mm256_set1_pd(above);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gt = _mm256_cmp_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(pred + i), _CMP_GT_OQ);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(v_below, v_above, gt));
  }
  for (; i < n; ++i) out[i] = y[i] > pred[i] ? above : below;
}

double weighted_squared_error(const double* pred, const double* y, const double* w,
                              std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pred + i), _mm256_loadu_pd(y + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(d, d)));
  }
  double total = combine_lanes(acc);
  for (std::size_t i = body; i < n; ++i) {
    const double d = pred[i] - y[i];
    total += w[i] * (d * d);
  }
  return total;
}

double weighted_pinball(const double* pred, const double* y, const double* w, double alpha,
                        std::size_t n) {
  const __m256d v_alpha = _mm256_set1_pd(alpha);
  const __m256d v_below = _mm256_set1_pd(alpha - 1.0);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(pred + i));
    const __m256d nonneg = _mm256_cmp_pd(r, zero, _CMP_GE_OQ);
    const __m256d coef = _mm256_blendv_pd(v_below, v_alpha, nonneg);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(coef, r)));
  }
  double total = combine_lanes(acc);
  for (std::size_t i = body; i < n; ++i) {
    const double r = y[i] - pred[i];
    total += w[i] * (r >= 0.0 ? alpha * r : (alpha - 1.0) * r);
  }
  return total;
}

void standardize(const double* v, const double* mean, const double* sd, double* out,
                 std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d s = _mm256_loadu_pd(sd + i);
    const __m256d q = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(v + i), _mm256_loadu_pd(mean + i)), s);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(q, zero, _mm256_cmp_pd(s, zero, _CMP_EQ_OQ)));
  }
  for (; i < n; ++i) out[i] = sd[i] == 0.0 ? 0.0 : (v[i] - mean[i]) / sd[i];
}

void limb_add(std::int64_t* acc, const std::int64_t* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    auto* a = reinterpret_cast<__m256i*>(acc + i);
    const auto* s = reinterpret_cast<const __m256i*>(src + i);
    _mm256_storeu_si256(a, _mm256_add_epi64(_mm256_loadu_si256(a), _mm256_loadu_si256(s)));
  }
  for (; i < n; ++i) acc[i] += src[i];
}

void limb_sub(std::int64_t* acc, const std::int64_t* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    auto* a = reinterpret_cast<__m256i*>(acc + i);
    const auto* s = reinterpret_cast<const __m256i*>(src + i);
    _mm256_storeu_si256(a, _mm256_sub_epi64(_mm256_loadu_si256(a), _mm256_loadu_si256(s)));
  }
  for (; i < n; ++i) acc[i] -= src[i];
}

void histogram_accumulate(std::int64_t* hist, std::int32_t* counts, const std::uint8_t* bins,
                          const std::uint32_t* rows, std::size_t nrows,
                          const std::int64_t* digits, std::size_t width) {
  for (std::size_t k = 0; k < nrows; ++k) {
    const std::uint32_t r = rows[k];
    const std::uint8_t b = bins[r];
    ++counts[b];
    std::int64_t* dst = hist + static_cast<std::size_t>(b) * width;
    const std::int64_t* src = digits + static_cast<std::size_t>(r) * width;
    std::size_t i = 0;
    for (; i + 4 <= width; i += 4) {
      auto* d = reinterpret_cast<__m256i*>(dst + i);
      const auto* s = reinterpret_cast<const __m256i*>(src + i);
      _mm256_storeu_si256(d, _mm256_add_epi64(_mm256_loadu_si256(d), _mm256_loadu_si256(s)));
    }
    for (; i < width; ++i) dst[i] += src[i];
  }
}

void percent_errors(const double* pred, const double* actual, double* out, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d hundred = _mm256_set1_pd(100.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(actual + i);
    const __m256d q = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(pred + i), a), a);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_andnot_pd(sign, q), hundred));
  }
  for (; i < n; ++i) out[i] = std::fabs((pred[i] - actual[i]) / actual[i]) * 100.0;
}

std::size_t count_less_than_scaled(const double* actual, const double* pred, double factor,
                                   std::size_t n) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d scaled = _mm256_mul_pd(f, _mm256_loadu_pd(pred + i));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(actual + i), scaled, _CMP_LT_OQ));
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i) count += actual[i] < factor * pred[i] ? 1 : 0;
  return count;
}

std::size_t count_at_most(const double* values, double threshold, std::size_t n) {
  const __m256d t = _mm256_set1_pd(threshold);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(values + i), t, _CMP_LE_OQ));
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i) count += values[i] <= threshold ? 1 : 0;
  return count;
}

constexpr KernelTable kAvx2{
    Isa::avx2,       subtract,         quantile_gradient, weighted_squared_error,
    weighted_pinball, standardize,     limb_add,          limb_sub,
    histogram_accumulate, percent_errors, count_less_than_scaled, count_at_most,
};

}  // namespace

const KernelTable& avx2_kernels() noexcept { return kAvx2; }

}  // namespace qpt::simd
