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

#include "qpt/gbdt.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <vector>

#include "qpt/errors.hpp"
#include "qpt/preprocess.hpp"
#include "qpt/rng.hpp"
#include "qpt/synthgen.hpp"

namespace qpt {
namespace {

FeatureMatrix matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  FeatureMatrix x;
  x.rows = rows;
  for (std::size_t c = 0; c < cols; ++c) x.columns.push_back("f" + std::to_string(c));
  x.values = std::move(values);
  return x;
}

FeatureMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, int levels) {
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = levels > 0 ? static_cast<double>(rng.uniform_int(0, levels - 1)) : rng.uniform(-3.0, 3.0);
  return matrix(rows, cols, std::move(v));
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

void expect_bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(std::bit_cast<std::uint64_t>(a[i]), std::bit_cast<std::uint64_t>(b[i])) << "row " << i;
  }
}

TEST(Fit, ZeroRoundsPredictsBaseScore) {
  Hyperparams hp;
  hp.n_estimators = 0;
  const auto x = matrix(2, 1, {0.0, 1.0});
  const std::vector<double> y = {1.0, 3.0};
  const auto model = fit(x, y, ones(2), hp);
  EXPECT_EQ(model.base_score, 2.0);
  EXPECT_TRUE(model.trees.empty());
  EXPECT_EQ(predict(model, x), (std::vector<double>{2.0, 2.0}));
  EXPECT_EQ(feature_importance(model), (std::vector<double>{0.0}));
}

TEST(Fit, StepFunctionSplitsBetweenOneAndTwo) {
  Hyperparams hp;
  hp.n_estimators = 1;
  hp.num_leaves = 2;
  hp.learning_rate = 1.0;
  const auto x = matrix(4, 1, {0.0, 1.0, 2.0, 3.0});
  const std::vector<double> y = {0.0, 0.0, 1.0, 1.0};
  const auto model = fit(x, y, ones(4), hp);
  ASSERT_EQ(model.trees.size(), 1u);
  const Tree& t = model.trees[0];
  ASSERT_EQ(t.nodes.size(), 3u);
  EXPECT_EQ(t.nodes[0].feature, 0);
  EXPECT_EQ(t.nodes[0].threshold, 1.5);
  EXPECT_EQ(predict(model, x), y);
  const auto at = predict(model, matrix(2, 1, {1.5, 1.5000000000000002}));
  EXPECT_EQ(at, (std::vector<double>{0.0, 1.0}));
  const auto importance = feature_importance(model);
  EXPECT_EQ(importance.size(), 1u);
  EXPECT_GT(importance[0], 0.0);
}

TEST(Fit, WeightedRowEqualsDuplicatedRows) {
  Hyperparams hp;
  hp.n_estimators = 20;
  hp.num_leaves = 4;
  const auto x = matrix(2, 1, {0.0, 1.0});
  const std::vector<double> y = {1.0, 5.0};
  const auto weighted = fit(x, y, std::vector<double>{3.0, 1.0}, hp);
  const auto dup = fit(matrix(4, 1, {0.0, 0.0, 0.0, 1.0}), std::vector<double>{1.0, 1.0, 1.0, 5.0}, ones(4), hp);
  const auto probe = matrix(5, 1, {-1.0, 0.0, 0.3, 1.0, 7.0});
  expect_bits_equal(predict(weighted, probe), predict(dup, probe));
}

TEST(Fit, InputValidation) {
  Hyperparams hp;
  const auto x = matrix(2, 1, {0.0, 1.0});
  EXPECT_THROW(fit(x, std::vector<double>{1.0}, ones(2), hp), DataError);
  EXPECT_THROW(fit(x, std::vector<double>{1.0, 2.0}, ones(1), hp), DataError);
  EXPECT_THROW(fit(x, std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 0.0}, hp), DataError);
  EXPECT_THROW(fit(x, std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, -1.0}, hp), DataError);
  EXPECT_THROW(fit(x, std::vector<double>{1.0, NAN}, ones(2), hp), DataError);
  EXPECT_THROW(fit(matrix(0, 1, {}), std::vector<double>{}, std::vector<double>{}, hp), DataError);
  hp.num_leaves = 1;
  EXPECT_THROW(fit(x, std::vector<double>{1.0, 2.0}, ones(2), hp), ConfigError);
}

TEST(Fit, TreesRespectLeafAndDepthLimits) {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    Hyperparams hp;
    hp.n_estimators = 5;
    hp.num_leaves = static_cast<int>(rng.uniform_int(2, 40));
    hp.max_depth = rng.bernoulli(0.3) ? -1 : static_cast<int>(rng.uniform_int(1, 6));
    const auto x = random_matrix(rng, 300, 4, 0);
    std::vector<double> y(300);
    for (auto& v : y) v = rng.uniform(-10.0, 10.0);
    const auto model = fit(x, y, ones(300), hp);
    for (const auto& t : model.trees) {
      EXPECT_TRUE(t.well_formed());
      EXPECT_LE(t.num_leaves(), static_cast<std::size_t>(hp.num_leaves));
      if (hp.max_depth > 0) {
        EXPECT_LE(t.depth(), hp.max_depth);
      }
    }
  }
}

TEST(Fit, L2LossIsNonIncreasing) {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    Hyperparams hp;
    hp.n_estimators = 60;
    hp.learning_rate = rng.uniform(0.05, 1.0);
    const auto x = random_matrix(rng, 500, 3, trial % 2 ? 0 : 7);
    std::vector<double> y(500);
    std::vector<double> w(500);
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = std::sin(x.at(i, 0)) * 10.0 + x.at(i, 1) + rng.uniform(-1.0, 1.0);
      w[i] = rng.uniform(0.1, 2.0);
    }
    const auto model = fit(x, y, w, hp);
    ASSERT_EQ(model.training_loss.size(), 61u);
    for (std::size_t r = 1; r < model.training_loss.size(); ++r) {
      EXPECT_LE(model.training_loss[r], model.training_loss[r - 1] + 1e-12) << "round " << r;
    }
  }
}

TEST(Fit, QuantileBaseScoreAndCoverage) {
  Hyperparams hp;
  hp.objective = Objective::quantile;
  hp.alpha = 0.9;
  hp.n_estimators = 0;
  const auto x = matrix(10, 1, std::vector<double>(10, 0.0));
  std::vector<double> y;
  for (int i = 1; i <= 10; ++i) y.push_back(i);
  EXPECT_EQ(fit(x, y, ones(10), hp).base_score, 9.0);

  Rng rng(3);
  hp.n_estimators = 300;
  hp.learning_rate = 0.05;
  hp.num_leaves = 8;
  hp.min_child_weight = 100.0;
  const auto sample = [&](std::size_t n, FeatureMatrix& x, std::vector<double>& y) {
    x = random_matrix(rng, n, 2, 0);
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = 0.3 * x.at(i, 0) + rng.uniform(0.0, 1.0);
  };
  FeatureMatrix xr, xt;
  std::vector<double> yr, yt;
  sample(4000, xr, yr);
  sample(4000, xt, yt);
  const auto pred = predict(fit(xr, yr, ones(yr.size()), hp), xt);
  std::size_t below = 0;
  for (std::size_t i = 0; i < yt.size(); ++i) below += yt[i] <= pred[i];
  EXPECT_NEAR(static_cast<double>(below) / static_cast<double>(yt.size()), 0.9, 0.03);
}

TEST(Fit, IdenticalRowsGetIdenticalPredictionsAndBinConstancy) {
  Rng rng(4);
  const auto x = random_matrix(rng, 400, 3, 5);
  std::vector<double> y(400);
  for (auto& v : y) v = rng.uniform(0.0, 100.0);
  Hyperparams hp;
  hp.n_estimators = 30;
  const auto model = fit(x, y, ones(400), hp);
  const auto pred = predict(model, x);
  for (std::size_t a = 0; a < x.rows; ++a) {
    for (std::size_t b = a + 1; b < x.rows; ++b) {
      bool same_bins = true;
      for (std::size_t f = 0; f < x.cols(); ++f) same_bins = same_bins && model.bins.bin(f, x.at(a, f)) == model.bins.bin(f, x.at(b, f));
      if (same_bins) {
        ASSERT_EQ(pred[a], pred[b]);
      }
    }
  }
}

TEST(Fit, ThreadCountAndRowOrderDoNotChangeTheModel) {
  GeneratorConfig gc;
  const auto jobs = generate(gc, 6000);
  const auto pipeline = fit_pipeline(default_feature_specs(), jobs);
  const auto x = transform(pipeline, jobs);
  std::vector<double> y;
  for (const auto& j : jobs) y.push_back(j.qpu_time_seconds);
  Rng rng(5);
  std::vector<double> w(y.size());
  for (auto& v : w) v = rng.uniform(0.1, 1.0);
  Hyperparams hp;
  hp.n_estimators = 15;
  const auto one = fit(x, y, w, hp, 1);
  const auto eight = fit(x, y, w, hp, 8);
  EXPECT_EQ(one, eight);

  std::vector<std::size_t> perm(x.rows);
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = perm.size() - 1 - i;
  FeatureMatrix xr = x;
  std::vector<double> yr(y.size());
  std::vector<double> wr(w.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t c = 0; c < x.cols(); ++c) xr.values[i * x.cols() + c] = x.at(perm[i], c);
    yr[i] = y[perm[i]];
    wr[i] = w[perm[i]];
  }
  const auto reversed = fit(xr, yr, wr, hp, 3);
  EXPECT_EQ(reversed.trees, one.trees);
  EXPECT_EQ(reversed.base_score, one.base_score);
}

TEST(Fit, ConstantFeatureHasZeroImportance) {
  Rng rng(6);
  auto x = random_matrix(rng, 1000, 3, 0);
  for (std::size_t r = 0; r < x.rows; ++r) x.values[r * 3 + 1] = 2.5;
  std::vector<double> y(1000);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 3.0 * x.at(i, 0) - 2.0 * x.at(i, 2) * x.at(i, 2);
  Hyperparams hp;
  hp.n_estimators = 40;
  const auto imp = feature_importance(fit(x, y, ones(1000), hp));
  EXPECT_GT(imp[0], 0.0);
  EXPECT_EQ(imp[1], 0.0);
  EXPECT_GT(imp[2], 0.0);
}

TEST(Fit, MinSplitGainAndMinChildWeightPrune) {
  const auto x = matrix(4, 1, {0.0, 1.0, 2.0, 3.0});
  const std::vector<double> y = {0.0, 0.0, 1.0, 1.0};
  Hyperparams hp;
  hp.n_estimators = 1;
  hp.min_split_gain = 1.0;
  EXPECT_EQ(fit(x, y, ones(4), hp).trees[0].nodes.size(), 1u);
  hp.min_split_gain = 0.0;
  hp.min_child_weight = 2.5;
  EXPECT_EQ(fit(x, y, ones(4), hp).trees[0].nodes.size(), 1u);
  hp.min_child_weight = 2.0;
  EXPECT_EQ(fit(x, y, ones(4), hp).trees[0].nodes.size(), 3u);
}

TEST(Predict, LayoutMismatchIsError) {
  Hyperparams hp;
  hp.n_estimators = 1;
  const auto model = fit(matrix(2, 1, {0.0, 1.0}), std::vector<double>{0.0, 1.0}, ones(2), hp);
  EXPECT_THROW(predict(model, matrix(1, 2, {0.0, 0.0})), DataError);
  auto renamed = matrix(1, 1, {0.0});
  renamed.columns[0] = "other";
  EXPECT_THROW(predict(model, renamed), DataError);
}

TEST(ModelJson, RoundTripPredictsBitExact) {
  Rng rng(7);
  const auto x = random_matrix(rng, 500, 3, 0);
  std::vector<double> y(500);
  for (auto& v : y) v = rng.uniform(0.0, 1e3);
  Hyperparams hp;
  hp.n_estimators = 25;
  hp.objective = Objective::quantile;
  hp.alpha = 0.7;
  const auto model = fit(x, y, ones(500), hp);
  const auto back = model_from_json(nlohmann::json::parse(model_to_json(model).dump()));
  EXPECT_EQ(back, model);
  expect_bits_equal(predict(back, x), predict(model, x));
}

TEST(ModelJson, RejectsMalformedInput) {
  Hyperparams hp;
  hp.n_estimators = 2;
  const auto model = fit(matrix(3, 1, {0.0, 1.0, 2.0}), std::vector<double>{0.0, 1.0, 3.0}, ones(3), hp);
  auto j = nlohmann::json::parse(model_to_json(model).dump());
  j["version"] = 99;
  EXPECT_THROW(model_from_json(j), DataError);
  j = nlohmann::json::parse(model_to_json(model).dump());
  j["trees"][0]["left"][0] = 42;
  EXPECT_THROW(model_from_json(j), DataError);
  j = nlohmann::json::parse(model_to_json(model).dump());
  j["hyperparams"]["n_estimatorz"] = 3;
  EXPECT_THROW(model_from_json(j), DataError);
}

TEST(HyperparamsJson, StrictKeysAndValidation) {
  Hyperparams hp;
  hp.num_leaves = 63;
  hp.objective = Objective::quantile;
  EXPECT_EQ(hyperparams_from_json(nlohmann::json::parse(hyperparams_to_json(hp).dump())), hp);
  try {
    hyperparams_from_json(nlohmann::json::parse(R"({"num_leafs": 3})"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("num_leafs"), std::string::npos);
  }
  EXPECT_THROW(hyperparams_from_json(nlohmann::json::parse(R"({"learning_rate": 0})")), ConfigError);
  EXPECT_THROW(hyperparams_from_json(nlohmann::json::parse(R"({"objective": "huber"})")), ConfigError);
  EXPECT_THROW(hyperparams_from_json(nlohmann::json::parse(R"({"max_bins": 256})")), ConfigError);
}

}  // namespace
}  // namespace qpt
