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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace qpt {

// Exact summation of doubles in a wide fixed-point register.
//
// A register is a run of signed 64-bit digits d[0..width) holding the value
//   sum_k d[k] * 2^(base + 32 k).
// Adding a double whose set bits all lie in [base, base + 32 width) deposits
// its 53-bit significand into at most three digits, so every sum is exact and
// independent of the order (and grouping) of its terms. Digits carry 32 bits
// of payload and 31 bits of headroom, so up to 2^31 terms can be added before
// normalisation. round() returns the correctly rounded (nearest-even) double.
class FixedPointFormat {
 public:
  // Smallest format that represents every value in `values` exactly. Zeros and
  // an empty span yield a one-digit format.
  static FixedPointFormat covering(std::span<const double> values);
  // The full binary64 range; any finite double is representable.
  static FixedPointFormat full_range() noexcept;

  int base_exponent() const noexcept { return base_; }
  std::size_t width() const noexcept { return width_; }

  bool represents(double x) const noexcept;

  // digits += x. Throws InvariantError if x is not representable.
  void add(double x, std::span<std::int64_t> digits) const;
  // digits -= x.
  void subtract(double x, std::span<std::int64_t> digits) const;

  double round(std::span<const std::int64_t> digits) const;

 private:
  FixedPointFormat(int base, std::size_t width) noexcept : base_(base), width_(width) {}
  void deposit(double x, bool negate, std::span<std::int64_t> digits) const;

  int base_ = 0;
  std::size_t width_ = 1;
};

inline constexpr std::size_t kMaxFixedPointWidth = 72;

// x = a * b exactly as hi + lo, with hi = fl(a * b).
struct TwoProduct {
  double hi;
  double lo;
};
TwoProduct two_product(double a, double b) noexcept;

// Self-contained correctly rounded accumulator over the full double range.
class ExactSum {
 public:
  ExactSum() noexcept { digits_.fill(0); }

  void add(double x);
  // Adds a * b without intermediate rounding.
  void add_product(double a, double b);
  double value() const;

 private:
  std::array<std::int64_t, kMaxFixedPointWidth> digits_;
};

}  // namespace qpt
