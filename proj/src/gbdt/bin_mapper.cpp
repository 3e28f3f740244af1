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

#include <algorithm>
#include <numeric>

#include "qpt/errors.hpp"
#include "qpt/gbdt.hpp"

namespace qpt {

namespace {

double threshold_between(double a, double b) noexcept {
  const double t = std::midpoint(a, b);
  return t < b ? t : a;
}

}  // namespace

BinMapper::BinMapper(std::vector<std::vector<double>> thresholds)
    : thresholds_(std::move(thresholds)) {
  for (const auto& t : thresholds_) {
    if (t.size() > 254) throw InvariantError("a feature has more than 255 bins");
    if (std::adjacent_find(t.begin(), t.end(), std::greater_equal<>()) != t.end()) {
      throw InvariantError("bin thresholds must be strictly increasing");
    }
  }
}

std::vector<double> BinMapper::feature_thresholds(std::vector<double> values, int max_bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> distinct;
  std::vector<std::size_t> counts;
  for (const double v : values) {
    if (distinct.empty() || v != distinct.back()) {
      distinct.push_back(v);
      counts.push_back(0);
    }
    ++counts.back();
  }
  std::vector<double> out;
  if (distinct.size() <= 1) return out;
  const auto bins = static_cast<std::size_t>(max_bins);
  if (distinct.size() <= bins) {
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
      out.push_back(threshold_between(distinct[i], distinct[i + 1]));
    }
    return out;
  }
  // Cut after the distinct value at which the running count first reaches
  // each of the targets n * k / max_bins, k = 1 .. max_bins - 1.
  const double n = static_cast<double>(values.size());
  std::size_t next = 1;
  std::size_t cumulative = 0;
  for (std::size_t i = 0; i + 1 < distinct.size() && next < bins; ++i) {
    cumulative += counts[i];
    const double target = n * static_cast<double>(next) / static_cast<double>(bins);
    if (static_cast<double>(cumulative) >= target) {
      out.push_back(threshold_between(distinct[i], distinct[i + 1]));
      while (next < bins &&
             n * static_cast<double>(next) / static_cast<double>(bins) <= static_cast<double>(cumulative)) {
        ++next;
      }
    }
  }
  return out;
}

BinMapper BinMapper::build(const FeatureMatrix& x, int max_bins) {
  if (max_bins < 2 || max_bins > 255) throw ConfigError("max_bins must lie in [2, 255]");
  std::vector<std::vector<double>> thresholds(x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) thresholds[c] = feature_thresholds(x.column(c), max_bins);
  return BinMapper(std::move(thresholds));
}

std::uint8_t BinMapper::bin(std::size_t feature, double value) const noexcept {
  const auto& t = thresholds_[feature];
  return static_cast<std::uint8_t>(std::lower_bound(t.begin(), t.end(), value) - t.begin());
}

}  // namespace qpt
