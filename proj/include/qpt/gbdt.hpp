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
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qpt/preprocess.hpp"

namespace qpt {

enum class Objective { l2, quantile };

std::string_view to_string(Objective objective) noexcept;
Objective parse_objective(std::string_view text);

struct Hyperparams {
  int n_estimators = 200;
  double learning_rate = 0.1;
  int max_depth = -1;  // -1: unlimited
  int num_leaves = 31;
  double min_child_weight = 1e-3;  // minimum weighted hessian sum per child
  double min_split_gain = 0.0;
  Objective objective = Objective::l2;
  double alpha = 0.5;  // quantile level
  int max_bins = 255;
  // Recorded with the model. The learner itself draws no random numbers
  // (no bagging or feature sampling), so fits do not depend on it.
  std::uint64_t seed = 0;

  // Throws ConfigError naming the offending field.
  void validate() const;
  bool operator==(const Hyperparams&) const = default;
};

// Per-feature histogram bin boundaries.
//
// A value v falls in bin b, the index of the first threshold t with v <= t
// (or the last bin if there is none). Thresholds sit strictly between adjacent
// distinct training values: std::midpoint(a, b), or a when the midpoint rounds
// onto b.
class BinMapper {
 public:
  BinMapper() = default;
  explicit BinMapper(std::vector<std::vector<double>> thresholds);

  // One bin per distinct value when a feature has at most max_bins of them;
  // otherwise cuts at approximately equal-count quantiles of the sorted values.
  static BinMapper build(const FeatureMatrix& x, int max_bins);
  static std::vector<double> feature_thresholds(std::vector<double> values, int max_bins);

  std::size_t num_features() const noexcept { return thresholds_.size(); }
  std::size_t num_bins(std::size_t feature) const noexcept { return thresholds_[feature].size() + 1; }
  const std::vector<double>& thresholds(std::size_t feature) const noexcept {
    return thresholds_[feature];
  }
  std::uint8_t bin(std::size_t feature, double value) const noexcept;

  bool operator==(const BinMapper&) const = default;

 private:
  std::vector<std::vector<double>> thresholds_;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output, learning rate already applied
  double gain = 0.0;   // split gain of an internal node

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

// Nodes are index-linked; nodes[0] is the root. Values <= threshold go left.
struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> row) const noexcept;
  std::size_t num_leaves() const noexcept;
  int depth() const noexcept;  // edges on the longest root-to-leaf path
  // Every internal node has two in-range children and every node except the
  // root has exactly one parent.
  bool well_formed() const;

  bool operator==(const Tree&) const = default;
};

struct GbdtModel {
  double base_score = 0.0;
  std::vector<Tree> trees;
  BinMapper bins;
  std::vector<std::string> layout;
  Hyperparams hyperparams;
  // Weighted mean training loss before the first tree and after each round.
  std::vector<double> training_loss;

  double predict_row(std::span<const double> row) const noexcept;
  bool operator==(const GbdtModel&) const = default;
};

// Weighted mean loss: squared error for l2, pinball loss for quantile.
double weighted_loss(Objective objective, double alpha, std::span<const double> predictions,
                     std::span<const double> targets, std::span<const double> weights);

// Histogram-based boosting with leaf-wise growth. Gradient and hessian sums
// are exact (see FixedPointFormat), so the fitted model does not depend on row
// order, on the thread count, or on whether a row appears once with integer
// weight k or k times with weight 1.
GbdtModel fit(const FeatureMatrix& x, std::span<const double> y, std::span<const double> w,
              const Hyperparams& hp, int threads = 1);

std::vector<double> predict(const GbdtModel& model, const FeatureMatrix& x, int threads = 1);

// Total split gain per feature over all trees.
std::vector<double> feature_importance(const GbdtModel& model);

nlohmann::ordered_json hyperparams_to_json(const Hyperparams& hp);
Hyperparams hyperparams_from_json(const nlohmann::json& j);
nlohmann::ordered_json model_to_json(const GbdtModel& model);
GbdtModel model_from_json(const nlohmann::json& j);

}  // namespace qpt
