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

#include "tree_learner.hpp"

#include <algorithm>
#include <limits>

#include "qpt/errors.hpp"
#include "qpt/parallel.hpp"
#include "qpt/simd/kernels.hpp"

namespace qpt::detail {

namespace {

// Below this many (row, feature) visits a leaf is processed on one thread.
constexpr std::size_t kMinParallelWork = std::size_t{1} << 15;

}  // namespace

BinnedColumns bin_columns(const FeatureMatrix& x, const BinMapper& mapper) {
  if (mapper.num_features() != x.cols()) throw InvariantError("bin mapper width differs from matrix");
  BinnedColumns out;
  out.rows = x.rows;
  out.bins.resize(x.cols());
  out.num_bins.resize(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    out.num_bins[f] = mapper.num_bins(f);
    auto& col = out.bins[f];
    col.resize(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) col[r] = mapper.bin(f, x.at(r, f));
  }
  return out;
}

TreeLearner::TreeLearner(const BinnedColumns& data, const BinMapper& mapper, const Hyperparams& hp,
                         int threads)
    : data_(data), mapper_(mapper), hp_(hp), threads_(std::max(threads, 1)) {
  if (data_.rows > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError("too many training rows");
  }
  const std::size_t features = data_.bins.size();
  count_offset_.resize(features);
  for (std::size_t f = 0; f < features; ++f) {
    count_offset_[f] = total_bins_;
    total_bins_ += data_.num_bins[f];
  }
  sum_offset_.resize(features);
  indices_.resize(data_.rows);
  scratch_.resize(data_.rows);
}

bool TreeLearner::worth_threading(std::size_t rows) const noexcept {
  return threads_ > 1 && rows * data_.bins.size() >= kMinParallelWork;
}

void TreeLearner::prepare_digits(std::span<const double> gradients,
                                 std::span<const double> hessians,
                                 std::span<const double> weights) {
  const std::size_t n = data_.rows;
  // Each weighted term w * g is carried exactly as the pair (hi, lo).
  std::vector<double> terms(4 * n);
  for (std::size_t r = 0; r < n; ++r) {
    const TwoProduct g = two_product(weights[r], gradients[r]);
    const TwoProduct h = two_product(weights[r], hessians[r]);
    terms[4 * r] = g.hi;
    terms[4 * r + 1] = g.lo;
    terms[4 * r + 2] = h.hi;
    terms[4 * r + 3] = h.lo;
  }
  format_ = FixedPointFormat::covering(terms);
  width_ = format_.width();
  stride_ = 2 * width_;
  for (std::size_t f = 0, offset = 0; f < data_.bins.size(); ++f) {
    sum_offset_[f] = offset;
    offset += data_.num_bins[f] * stride_;
  }
  row_digits_.assign(n * stride_, 0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::span<std::int64_t> grad(row_digits_.data() + r * stride_, width_);
    const std::span<std::int64_t> hess(row_digits_.data() + r * stride_ + width_, width_);
    format_.add(terms[4 * r], grad);
    format_.add(terms[4 * r + 1], grad);
    format_.add(terms[4 * r + 2], hess);
    format_.add(terms[4 * r + 3], hess);
  }
}

TreeLearner::Histogram TreeLearner::build_histogram(std::size_t begin, std::size_t end) const {
  Histogram h;
  h.sums.assign(total_bins_ * stride_, 0);
  h.counts.assign(total_bins_, 0);
  const auto& k = simd::kernels();
  const auto build = [&](std::size_t f_begin, std::size_t f_end) {
    for (std::size_t f = f_begin; f < f_end; ++f) {
      k.histogram_accumulate(h.sums.data() + sum_offset_[f], h.counts.data() + count_offset_[f],
                             data_.bins[f].data(), indices_.data() + begin, end - begin,
                             row_digits_.data(), stride_);
    }
  };
  if (worth_threading(end - begin)) {
    parallel_for(data_.bins.size(), threads_, build);
  } else {
    build(0, data_.bins.size());
  }
  return h;
}

void TreeLearner::subtract_histogram(Histogram& from, const Histogram& part) const {
  const auto& k = simd::kernels();
  k.limb_sub(from.sums.data(), part.sums.data(), from.sums.size());
  for (std::size_t i = 0; i < from.counts.size(); ++i) from.counts[i] -= part.counts[i];
}

void TreeLearner::summarise(Leaf& leaf) const {
  leaf.gradient_sum = format_.round(std::span(leaf.total).first(width_));
  leaf.hessian_sum = format_.round(std::span(leaf.total).subspan(width_, width_));
}

bool TreeLearner::splittable(const Leaf& leaf) const noexcept {
  if (leaf.count() < 2) return false;
  return hp_.max_depth <= 0 || leaf.depth < hp_.max_depth;
}

TreeLearner::Split TreeLearner::best_split_for_feature(const Leaf& leaf, std::size_t f) const {
  Split best;
  best.gain = -std::numeric_limits<double>::infinity();
  const std::size_t bins = data_.num_bins[f];
  if (bins < 2) return best;
  const auto& k = simd::kernels();
  const std::int64_t* sums = leaf.hist.sums.data() + sum_offset_[f];
  const std::int32_t* counts = leaf.hist.counts.data() + count_offset_[f];
  const double parent = leaf.gradient_sum * leaf.gradient_sum / leaf.hessian_sum;

  std::vector<std::int64_t> left(stride_, 0);
  std::vector<std::int64_t> right(stride_);
  std::size_t left_count = 0;
  for (std::size_t b = 0; b + 1 < bins; ++b) {
    k.limb_add(left.data(), sums + b * stride_, stride_);
    left_count += static_cast<std::size_t>(counts[b]);
    // An empty bin repeats the previous candidate, which cannot win a strict comparison.
    if (counts[b] == 0 || left_count == 0) continue;
    if (left_count >= leaf.count()) break;
    std::copy(leaf.total.begin(), leaf.total.end(), right.begin());
    k.limb_sub(right.data(), left.data(), stride_);
    const double hl = format_.round(std::span(left).subspan(width_, width_));
    const double hr = format_.round(std::span(right).subspan(width_, width_));
    if (hl < hp_.min_child_weight || hr < hp_.min_child_weight || hl <= 0.0 || hr <= 0.0) continue;
    const double gl = format_.round(std::span(left).first(width_));
    const double gr = format_.round(std::span(right).first(width_));
    const double gain = gl * gl / hl + gr * gr / hr - parent;
    if (gain > best.gain) {
      best.valid = true;
      best.feature = static_cast<int>(f);
      best.bin = static_cast<int>(b);
      best.gain = gain;
      best.left = left;
      best.left_count = left_count;
    }
  }
  return best;
}

void TreeLearner::find_best_split(Leaf& leaf) const {
  leaf.best = Split{};
  if (!splittable(leaf)) return;
  const std::size_t features = data_.bins.size();
  std::vector<Split> per_feature(features);
  const auto search = [&](std::size_t f_begin, std::size_t f_end) {
    for (std::size_t f = f_begin; f < f_end; ++f) per_feature[f] = best_split_for_feature(leaf, f);
  };
  if (worth_threading(leaf.count())) {
    parallel_for(features, threads_, search);
  } else {
    search(0, features);
  }
  Split best;
  for (auto& s : per_feature) {
    if (s.valid && (!best.valid || s.gain > best.gain)) best = std::move(s);
  }
  if (best.valid && best.gain > hp_.min_split_gain) leaf.best = std::move(best);
}

Tree TreeLearner::grow(std::span<const double> gradients, std::span<const double> hessians,
                       std::span<const double> weights, std::span<double> predictions) {
  const std::size_t n = data_.rows;
  prepare_digits(gradients, hessians, weights);
  for (std::size_t r = 0; r < n; ++r) indices_[r] = static_cast<std::uint32_t>(r);

  Tree tree;
  tree.nodes.emplace_back();
  std::vector<Leaf> leaves;
  {
    Leaf root;
    root.begin = 0;
    root.end = n;
    root.total.assign(stride_, 0);
    const auto& k = simd::kernels();
    for (std::size_t r = 0; r < n; ++r) k.limb_add(root.total.data(), row_digits_.data() + r * stride_, stride_);
    summarise(root);
    if (hp_.num_leaves > 1 && splittable(root)) {
      root.hist = build_histogram(root.begin, root.end);
      find_best_split(root);
    }
    leaves.push_back(std::move(root));
  }

  int leaf_count = 1;
  while (leaf_count < hp_.num_leaves) {
    // Frontier leaf with the largest gain; the earliest-created wins ties.
    std::size_t chosen = leaves.size();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const Leaf& l = leaves[i];
      if (l.split || !l.best.valid) continue;
      if (chosen == leaves.size() || l.best.gain > leaves[chosen].best.gain) chosen = i;
    }
    if (chosen == leaves.size()) break;

    Leaf parent = std::move(leaves[chosen]);
    leaves[chosen].split = true;
    const Split& split = parent.best;
    const auto f = static_cast<std::size_t>(split.feature);
    const auto bin = static_cast<std::uint8_t>(split.bin);

    // Stable partition of the parent's rows: bin <= split bin goes left.
    const auto& col = data_.bins[f];
    std::size_t nl = parent.begin;
    std::size_t nr = 0;
    for (std::size_t i = parent.begin; i < parent.end; ++i) {
      const std::uint32_t r = indices_[i];
      if (col[r] <= bin) {
        indices_[nl++] = r;
      } else {
        scratch_[nr++] = r;
      }
    }
    std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(nr),
              indices_.begin() + static_cast<std::ptrdiff_t>(nl));
    if (nl - parent.begin != split.left_count) throw InvariantError("row partition disagrees with histogram");

    const int left_node = static_cast<int>(tree.nodes.size());
    const int right_node = left_node + 1;
    TreeNode& node = tree.nodes[static_cast<std::size_t>(parent.node)];
    node.feature = split.feature;
    node.threshold = mapper_.thresholds(f)[static_cast<std::size_t>(split.bin)];
    node.left = left_node;
    node.right = right_node;
    node.gain = split.gain;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();

    Leaf left;
    left.node = left_node;
    left.begin = parent.begin;
    left.end = nl;
    left.depth = parent.depth + 1;
    left.total = split.left;
    Leaf right;
    right.node = right_node;
    right.begin = nl;
    right.end = parent.end;
    right.depth = parent.depth + 1;
    right.total = parent.total;
    simd::kernels().limb_sub(right.total.data(), left.total.data(), stride_);
    summarise(left);
    summarise(right);
    ++leaf_count;

    // Histograms are only needed if another split can still happen.
    if (leaf_count < hp_.num_leaves && (splittable(left) || splittable(right))) {
      Leaf& small = left.count() <= right.count() ? left : right;
      Leaf& large = left.count() <= right.count() ? right : left;
      small.hist = build_histogram(small.begin, small.end);
      large.hist = std::move(parent.hist);
      subtract_histogram(large.hist, small.hist);
      find_best_split(left);
      find_best_split(right);
    }
    leaves[chosen].hist = Histogram{};
    leaves.push_back(std::move(left));
    leaves.push_back(std::move(right));
  }

  for (Leaf& leaf : leaves) {
    if (leaf.split) continue;
    leaf.hist = Histogram{};
    const double value =
        leaf.hessian_sum > 0.0 ? -hp_.learning_rate * leaf.gradient_sum / leaf.hessian_sum : 0.0;
    tree.nodes[static_cast<std::size_t>(leaf.node)].value = value;
    for (std::size_t i = leaf.begin; i < leaf.end; ++i) predictions[indices_[i]] += value;
  }
  return tree;
}

}  // namespace qpt::detail
