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

#include <cmath>

#include "qpt/simd/kernels.hpp"

namespace qpt::simd {

namespace {

void subtract(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void quantile_gradient(const double* pred, const double* y, double alpha, double* out,
                       std::size_t n) {
  const double above = -alpha;
  const double below = 1.0 - alpha;
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] > pred[i] ? above : below;
}

double weighted_squared_error(const double* pred, const double* y, const double* w,
                              std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double d = pred[i + l] - y[i + l];
      lane[l] += w[i + l] * (d * d);
    }
  }
  double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = body; i < n; ++i) {
    const double d = pred[i] - y[i];
    total += w[i] * (d * d);
  }
  return total;
}

inline double pinball(double pred, double y, double alpha) {
  const double r = y - pred;
  return r >= 0.0 ? alpha * r : (alpha - 1.0) * r;
}

double weighted_pinball(const double* pred, const double* y, const double* w, double alpha,
                        std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) lane[l] += w[i + l] * pinball(pred[i + l], y[i + l], alpha);
  }
  double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = body; i < n; ++i) total += w[i] * pinball(pred[i], y[i], alpha);
  return total;
}

void standardize(const double* v, const double* mean, const double* sd, double* out,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = sd[i] == 0.0 ? 0.0 : (v[i] - mean[i]) / sd[i];
}

void limb_add(std::int64_t* acc, const std::int64_t* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += src[i];
}

void limb_sub(std::int64_t* acc, const std::int64_t* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] -= src[i];
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
    for (std::size_t i = 0; i < width; ++i) dst[i] += src[i];
  }
}

void percent_errors(const double* pred, const double* actual, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs((pred[i] - actual[i]) / actual[i]) * 100.0;
}

std::size_t count_less_than_scaled(const double* actual, const double* pred, double factor,
                                   std::size_t n) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += actual[i] < factor * pred[i] ? 1 : 0;
  return count;
}

std::size_t count_at_most(const double* values, double threshold, std::size_t n) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += values[i] <= threshold ? 1 : 0;
  return count;
}

constexpr KernelTable kScalar{
    Isa::scalar,     subtract,         quantile_gradient, weighted_squared_error,
    weighted_pinball, standardize,     limb_add,          limb_sub,
    histogram_accumulate, percent_errors, count_less_than_scaled, count_at_most,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace qpt::simd
