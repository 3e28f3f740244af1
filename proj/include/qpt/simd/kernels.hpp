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

#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and, where the
// host supports it, an AVX2 variant; the best supported variant is selected at
// first use. Every variant produces bit-identical results to the scalar
// reference: element-wise kernels evaluate the same IEEE operations per
// element, and reductions use one fixed association order (four interleaved
// lane sums over the largest multiple-of-four prefix, combined as
// (l0 + l1) + (l2 + l3), then the tail added left to right).

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace qpt::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;

  // out[i] = a[i] - b[i]
  void (*subtract)(const double* a, const double* b, double* out, std::size_t n);

  // out[i] = y[i] > pred[i] ? -alpha : 1 - alpha
  void (*quantile_gradient)(const double* pred, const double* y, double alpha, double* out,
                            std::size_t n);

  // sum of w[i] * ((pred[i] - y[i]) * (pred[i] - y[i]))
  double (*weighted_squared_error)(const double* pred, const double* y, const double* w,
                                   std::size_t n);

  // sum of w[i] * rho(y[i] - pred[i]), rho(r) = r >= 0 ? alpha * r : (alpha - 1) * r
  double (*weighted_pinball)(const double* pred, const double* y, const double* w, double alpha,
                             std::size_t n);

  // out[i] = sd[i] == 0 ? 0 : (v[i] - mean[i]) / sd[i]
  void (*standardize)(const double* v, const double* mean, const double* sd, double* out,
                      std::size_t n);

  // acc[i] += src[i] / acc[i] -= src[i]
  void (*limb_add)(std::int64_t* acc, const std::int64_t* src, std::size_t n);
  void (*limb_sub)(std::int64_t* acc, const std::int64_t* src, std::size_t n);

  // For each listed row r: hist[bins[r] * width .. + width) += digits[r * width .. + width)
  // and counts[bins[r]] += 1.
  void (*histogram_accumulate)(std::int64_t* hist, std::int32_t* counts,
                               const std::uint8_t* bins, const std::uint32_t* rows,
                               std::size_t nrows, const std::int64_t* digits, std::size_t width);

  // out[i] = |(pred[i] - actual[i]) / actual[i]| * 100
  void (*percent_errors)(const double* pred, const double* actual, double* out, std::size_t n);

  // number of i with actual[i] < factor * pred[i]
  std::size_t (*count_less_than_scaled)(const double* actual, const double* pred, double factor,
                                        std::size_t n);

  // number of i with values[i] <= threshold
  std::size_t (*count_at_most)(const double* values, double threshold, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
#if defined(QPT_BUILD_AVX2)
const KernelTable& avx2_kernels() noexcept;
#endif

bool isa_supported(Isa isa) noexcept;
std::vector<Isa> supported_isas();
const KernelTable& kernels_for(Isa isa);

// The table in use. Defaults to the widest supported ISA.
const KernelTable& kernels() noexcept;
void set_active_isa(Isa isa);

}  // namespace qpt::simd
