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
#include <cmath>
#include <numeric>

#include "qpt/errors.hpp"
#include "qpt/fixed_point.hpp"
#include "qpt/gbdt.hpp"
#include "qpt/parallel.hpp"
#include "qpt/simd/kernels.hpp"
#include "tree_learner.hpp"

namespace qpt {

namespace {

double weighted_mean(std::span<const double> y, std::span<const double> w) {
  ExactSum num;
  ExactSum den;
  for (std::size_t i = 0; i < y.size(); ++i) {
    num.add_product(w[i], y[i]);
    den.add(w[i]);
  }
  return num.value() / den.value();
}

// Smallest target whose cumulative weight (targets ascending) reaches
// alpha times the total weight.
double weighted_quantile(std::span<const double> y, std::span<const double> w, double alpha) {
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  ExactSum total;
  for (const double wi : w) total.add(wi);
  const double target = alpha * total.value();
  ExactSum running;
  for (const std::size_t i : order) {
    running.add(w[i]);
    if (running.value() >= target) return y[i];
  }
  return y[order.back()];
}

void check_finite(std::span<const double> values, const char* what) {
  for (const double v : values) {
    if (!std::isfinite(v)) throw DataError(std::string("non-finite value in ") + what);
  }
}

}  // namespace

std::string_view to_string(Objective objective) noexcept {
  return objective == Objective::l2 ? "l2" : "quantile";
}

Objective parse_objective(std::string_view text) {
  if (text == "l2") return Objective::l2;
  if (text == "quantile") return Objective::quantile;
  throw ConfigError("unknown objective '" + std::string(text) + "'");
}

void Hyperparams::validate() const {
  if (n_estimators < 0) throw ConfigError("model.n_estimators must be non-negative");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("model.learning_rate must lie in (0, 1]");
  }
  if (max_depth != -1 && max_depth < 1) throw ConfigError("model.max_depth must be -1 or at least 1");
  if (num_leaves < 2) throw ConfigError("model.num_leaves must be at least 2");
  if (!(min_child_weight >= 0.0) || !std::isfinite(min_child_weight)) {
    throw ConfigError("model.min_child_weight must be non-negative");
  }
  if (!(min_split_gain >= 0.0) || !std::isfinite(min_split_gain)) {
    throw ConfigError("model.min_split_gain must be non-negative");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("model.alpha must lie in (0, 1)");
  if (max_bins < 2 || max_bins > 255) throw ConfigError("model.max_bins must lie in [2, 255]");
}

double Tree::predict(std::span<const double> row) const noexcept {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

std::size_t Tree::num_leaves() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int Tree::depth() const noexcept {
  if (nodes.empty()) return 0;
  int deepest = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    const TreeNode& n = nodes[static_cast<std::size_t>(i)];
    if (n.is_leaf()) {
      deepest = std::max(deepest, d);
    } else {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return deepest;
}

bool Tree::well_formed() const {
  if (nodes.empty()) return false;
  std::vector<int> parents(nodes.size(), 0);
  for (const TreeNode& n : nodes) {
    if (n.is_leaf()) {
      if (n.left != -1 || n.right != -1) return false;
      continue;
    }
    for (const int child : {n.left, n.right}) {
      if (child <= 0 || static_cast<std::size_t>(child) >= nodes.size()) return false;
      ++parents[static_cast<std::size_t>(child)];
    }
  }
  if (parents[0] != 0) return false;
  return std::all_of(parents.begin() + 1, parents.end(), [](int p) { return p == 1; });
}

double GbdtModel::predict_row(std::span<const double> row) const noexcept {
  double out = base_score;
  for (const Tree& t : trees) out += t.predict(row);
  return out;
}

double weighted_loss(Objective objective, double alpha, std::span<const double> predictions,
                     std::span<const double> targets, std::span<const double> weights) {
  const auto& k = simd::kernels();
  ExactSum total_weight;
  for (const double w : weights) total_weight.add(w);
  const double sum = objective == Objective::l2
                         ? k.weighted_squared_error(predictions.data(), targets.data(),
                                                    weights.data(), targets.size())
                         : k.weighted_pinball(predictions.data(), targets.data(), weights.data(),
                                              alpha, targets.size());
  return sum / total_weight.value();
}

GbdtModel fit(const FeatureMatrix& x, std::span<const double> y, std::span<const double> w,
              const Hyperparams& hp, int threads) {
  hp.validate();
  if (x.rows != y.size() || x.rows != w.size() || x.values.size() != x.rows * x.cols()) {
    throw DataError("training matrix, targets and weights have mismatched sizes");
  }
  if (x.rows == 0) throw DataError("empty training set");
  check_finite(x.values, "feature matrix");
  check_finite(y, "targets");
  for (const double wi : w) {
    if (!(wi > 0.0) || !std::isfinite(wi)) throw DataError("sample weights must be positive and finite");
  }

  GbdtModel model;
  model.hyperparams = hp;
  model.layout = x.columns;
  model.bins = BinMapper::build(x, hp.max_bins);
  model.base_score = hp.objective == Objective::l2 ? weighted_mean(y, w) : weighted_quantile(y, w, hp.alpha);

  const detail::BinnedColumns binned = detail::bin_columns(x, model.bins);
  detail::TreeLearner learner(binned, model.bins, hp, threads);
  const auto& k = simd::kernels();

  std::vector<double> pred(x.rows, model.base_score);
  std::vector<double> grad(x.rows);
  const std::vector<double> hess(x.rows, 1.0);
  model.training_loss.push_back(weighted_loss(hp.objective, hp.alpha, pred, y, w));
  model.trees.reserve(static_cast<std::size_t>(hp.n_estimators));
  for (int round = 0; round < hp.n_estimators; ++round) {
    if (hp.objective == Objective::l2) {
      k.subtract(pred.data(), y.data(), grad.data(), x.rows);
    } else {
      k.quantile_gradient(pred.data(), y.data(), hp.alpha, grad.data(), x.rows);
    }
    model.trees.push_back(learner.grow(grad, hess, w, pred));
    model.training_loss.push_back(weighted_loss(hp.objective, hp.alpha, pred, y, w));
  }
  return model;
}

std::vector<double> predict(const GbdtModel& model, const FeatureMatrix& x, int threads) {
  if (x.columns != model.layout) throw DataError("feature layout does not match the model");
  std::vector<double> out(x.rows);
  parallel_for(x.rows, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) out[r] = model.predict_row(x.row(r));
  });
  return out;
}

std::vector<double> feature_importance(const GbdtModel& model) {
  std::vector<double> gain(model.layout.size(), 0.0);
  for (const Tree& t : model.trees) {
    for (const TreeNode& n : t.nodes) {
      if (!n.is_leaf()) gain[static_cast<std::size_t>(n.feature)] += n.gain;
    }
  }
  return gain;
}

}  // namespace qpt
