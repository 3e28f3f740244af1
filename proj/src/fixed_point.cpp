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

#include "qpt/fixed_point.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <cmath>
#include <limits>

#include "qpt/errors.hpp"

namespace qpt {

namespace {

constexpr int kDigitBits = 32;
constexpr std::int64_t kDigitMask = (std::int64_t{1} << kDigitBits) - 1;

// |x| = significand * 2^low_exponent with an odd significand (< 2^53).
struct Decomposed {
  std::uint64_t significand;
  int low_exponent;  // exponent of the lowest set bit
  int top_exponent;  // |x| < 2^top_exponent
};

Decomposed decompose(double x) noexcept {
  int e = 0;
  const double m = std::frexp(std::fabs(x), &e);  // [0.5, 1)
  auto sig = static_cast<std::uint64_t>(std::ldexp(m, 53));
  const int tz = std::countr_zero(sig);
  sig >>= tz;
  return {sig, e - 53 + tz, e};
}

// Carries every digit below the last into [0, 2^32); the last digit keeps the
// sign. Returns true if the value is negative.
bool normalise(std::int64_t* d, std::size_t n) noexcept {
  std::int64_t carry = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::int64_t v = d[k] + carry;
    carry = v >> kDigitBits;  // arithmetic shift: floor division
    d[k] = v & kDigitMask;
  }
  d[n - 1] += carry;
  return d[n - 1] < 0;
}

}  // namespace

TwoProduct two_product(double a, double b) noexcept {
  const double hi = a * b;
  return {hi, std::fma(a, b, -hi)};
}

FixedPointFormat FixedPointFormat::covering(std::span<const double> values) {
  int lo = INT_MAX;
  int hi = INT_MIN;
  for (const double x : values) {
    if (x == 0.0) continue;
    if (!std::isfinite(x)) throw InvariantError("non-finite value in exact summation");
    const Decomposed d = decompose(x);
    lo = std::min(lo, d.low_exponent);
    hi = std::max(hi, d.top_exponent);
  }
  if (lo == INT_MAX) return FixedPointFormat(0, 1);
  const auto bits = static_cast<std::size_t>(hi - lo);
  return FixedPointFormat(lo, (bits + kDigitBits - 1) / kDigitBits + 1);
}

FixedPointFormat FixedPointFormat::full_range() noexcept {
  // Lowest subnormal bit 2^-1074; largest finite magnitude below 2^1024.
  constexpr int lo = -1074;
  constexpr int hi = 1024;
  return FixedPointFormat(lo, static_cast<std::size_t>(hi - lo + kDigitBits - 1) / kDigitBits + 1);
}

bool FixedPointFormat::represents(double x) const noexcept {
  if (x == 0.0) return true;
  if (!std::isfinite(x)) return false;
  const Decomposed d = decompose(x);
  return d.low_exponent >= base_ &&
         d.top_exponent <= base_ + static_cast<int>(width_) * kDigitBits;
}

void FixedPointFormat::deposit(double x, bool negate, std::span<std::int64_t> digits) const {
  if (x == 0.0) return;
  if (!represents(x)) throw InvariantError("value outside the fixed-point format");
  const Decomposed d = decompose(x);
  const auto pos = static_cast<unsigned>(d.low_exponent - base_);
  const std::size_t k = pos / kDigitBits;
  const unsigned shift = pos % kDigitBits;
  const unsigned __int128 v = static_cast<unsigned __int128>(d.significand) << shift;
  const bool negative = (x < 0) != negate;
  for (std::size_t j = 0; j < 3; ++j) {
    const auto chunk = static_cast<std::int64_t>((v >> (kDigitBits * j)) & kDigitMask);
    if (chunk == 0) continue;
    digits[k + j] += negative ? -chunk : chunk;
  }
}

void FixedPointFormat::add(double x, std::span<std::int64_t> digits) const {
  deposit(x, false, digits);
}

void FixedPointFormat::subtract(double x, std::span<std::int64_t> digits) const {
  deposit(x, true, digits);
}

double FixedPointFormat::round(std::span<const std::int64_t> digits) const {
  // Two spare digits absorb carries out of the top digit.
  std::array<std::int64_t, kMaxFixedPointWidth + 2> d{};
  const std::size_t n = width_ + 2;
  std::copy(digits.begin(), digits.begin() + static_cast<std::ptrdiff_t>(width_), d.begin());
  const bool negative = normalise(d.data(), n);
  if (negative) {
    for (std::size_t k = 0; k < n; ++k) d[k] = -d[k];
    normalise(d.data(), n);
  }
  std::size_t top = n;
  while (top > 0 && d[top - 1] == 0) --top;
  if (top == 0) return 0.0;
  const std::size_t k = top - 1;
  // A 96-bit window whose leading digit is non-zero has at least 65
  // significant bits, so folding the remaining bits into a sticky bit at
  // position 0 leaves round-to-nearest-even unaffected.
  const auto hi = static_cast<std::uint64_t>(d[k]);
  const std::uint64_t mid = k >= 1 ? static_cast<std::uint64_t>(d[k - 1]) : 0;
  const std::uint64_t lo = k >= 2 ? static_cast<std::uint64_t>(d[k - 2]) : 0;
  bool sticky = false;
  for (std::size_t j = 0; j + 2 < k; ++j) sticky = sticky || d[j] != 0;
  unsigned __int128 window = (static_cast<unsigned __int128>(hi) << 64) |
                             (static_cast<unsigned __int128>(mid) << 32) | lo;
  if (sticky) window |= 1;
  const int scale = base_ + kDigitBits * (static_cast<int>(k) - 2);
  const double magnitude = std::ldexp(static_cast<double>(window), scale);
  return negative ? -magnitude : magnitude;
}

void ExactSum::add(double x) {
  static const FixedPointFormat format = FixedPointFormat::full_range();
  format.add(x, digits_);
}

void ExactSum::add_product(double a, double b) {
  const TwoProduct p = two_product(a, b);
  add(p.hi);
  add(p.lo);
}

double ExactSum::value() const {
  static const FixedPointFormat format = FixedPointFormat::full_range();
  return format.round(digits_);
}

}  // namespace qpt
