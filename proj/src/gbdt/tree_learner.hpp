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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qpt/fixed_point.hpp"
#include "qpt/gbdt.hpp"

namespace qpt::detail {

// Column-major bin indices of a training matrix.
struct BinnedColumns {
  std::size_t rows = 0;
  std::vector<std::vector<std::uint8_t>> bins;
  std::vector<std::size_t> num_bins;
};

BinnedColumns bin_columns(const FeatureMatrix& x, const BinMapper& mapper);

// Grows one regression tree leaf-wise: the frontier leaf with the largest
// split gain is split next, until num_leaves is reached or no leaf has a split
// with gain above min_split_gain.
//
// Per-bin gradient and hessian sums live in fixed-point registers (one format
// per tree, wide enough for every row's exact weighted term), so histograms
// are exact; sibling histograms come from parent minus child at no cost in
// accuracy. Ties go to the lower feature, then the lower bin, then the
// earlier-created leaf.
class TreeLearner {
 public:
  TreeLearner(const BinnedColumns& data, const BinMapper& mapper, const Hyperparams& hp,
              int threads);

  // Adds each training row's leaf value to predictions[row].
  Tree grow(std::span<const double> gradients, std::span<const double> hessians,
            std::span<const double> weights, std::span<double> predictions);

 private:
  struct Histogram {
    std::vector<std::int64_t> sums;    // [feature block][bin][gradient digits | hessian digits]
    std::vector<std::int32_t> counts;  // [feature block][bin]
  };

  struct Split {
    bool valid = false;
    int feature = -1;
    int bin = -1;
    double gain = 0.0;
    std::vector<std::int64_t> left;  // digits of the left child's sums
    std::size_t left_count = 0;
  };

  struct Leaf {
    int node = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
    int depth = 0;
    bool split = false;
    std::vector<std::int64_t> total;
    double gradient_sum = 0.0;
    double hessian_sum = 0.0;
    Histogram hist;
    Split best;

    std::size_t count() const noexcept { return end - begin; }
  };

  void prepare_digits(std::span<const double> gradients, std::span<const double> hessians,
                      std::span<const double> weights);
  Histogram build_histogram(std::size_t begin, std::size_t end) const;
  void subtract_histogram(Histogram& from, const Histogram& part) const;
  void summarise(Leaf& leaf) const;
  Split best_split_for_feature(const Leaf& leaf, std::size_t feature) const;
  void find_best_split(Leaf& leaf) const;
  bool splittable(const Leaf& leaf) const noexcept;
  bool worth_threading(std::size_t rows) const noexcept;

  const BinnedColumns& data_;
  const BinMapper& mapper_;
  Hyperparams hp_;
  int threads_;

  std::vector<std::size_t> sum_offset_;
  std::vector<std::size_t> count_offset_;
  std::size_t total_bins_ = 0;

  FixedPointFormat format_ = FixedPointFormat::covering({});
  std::size_t width_ = 1;   // digits per sum
  std::size_t stride_ = 2;  // digits per (gradient, hessian) pair
  std::vector<std::int64_t> row_digits_;
  std::vector<std::uint32_t> indices_;
  std::vector<std::uint32_t> scratch_;
};

}  // namespace qpt::detail
