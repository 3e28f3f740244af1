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

#include <set>

#include "qpt/errors.hpp"
#include "qpt/gbdt.hpp"

namespace qpt {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kModelFormatVersion = 1;

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("model.") + key + " has the wrong type");
  }
}

}  // namespace

ordered_json hyperparams_to_json(const Hyperparams& hp) {
  ordered_json j;
  j["n_estimators"] = hp.n_estimators;
  j["learning_rate"] = hp.learning_rate;
  j["max_depth"] = hp.max_depth;
  j["num_leaves"] = hp.num_leaves;
  j["min_child_weight"] = hp.min_child_weight;
  j["min_split_gain"] = hp.min_split_gain;
  j["objective"] = to_string(hp.objective);
  j["alpha"] = hp.alpha;
  j["max_bins"] = hp.max_bins;
  j["seed"] = hp.seed;
  return j;
}

Hyperparams hyperparams_from_json(const json& j) {
  static const std::set<std::string> known = {
      "n_estimators",   "learning_rate", "max_depth", "num_leaves", "min_child_weight",
      "min_split_gain", "objective",     "alpha",     "max_bins",   "seed"};
  if (!j.is_object()) throw ConfigError("model section must be an object");
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) throw ConfigError("unknown key 'model." + item.key() + "'");
  }
  Hyperparams hp;
  read_field(j, "n_estimators", hp.n_estimators);
  read_field(j, "learning_rate", hp.learning_rate);
  read_field(j, "max_depth", hp.max_depth);
  read_field(j, "num_leaves", hp.num_leaves);
  read_field(j, "min_child_weight", hp.min_child_weight);
  read_field(j, "min_split_gain", hp.min_split_gain);
  std::string objective(to_string(hp.objective));
  read_field(j, "objective", objective);
  hp.objective = parse_objective(objective);
  read_field(j, "alpha", hp.alpha);
  read_field(j, "max_bins", hp.max_bins);
  read_field(j, "seed", hp.seed);
  hp.validate();
  return hp;
}

ordered_json model_to_json(const GbdtModel& model) {
  ordered_json j;
  j["format"] = "qpt-gbdt";
  j["version"] = kModelFormatVersion;
  j["hyperparams"] = hyperparams_to_json(model.hyperparams);
  j["base_score"] = model.base_score;
  j["layout"] = model.layout;
  ordered_json bins = ordered_json::array();
  for (std::size_t f = 0; f < model.bins.num_features(); ++f) bins.push_back(model.bins.thresholds(f));
  j["bin_thresholds"] = bins;
  ordered_json trees = ordered_json::array();
  for (const Tree& t : model.trees) {
    ordered_json feature = ordered_json::array(), threshold = ordered_json::array(),
                 left = ordered_json::array(), right = ordered_json::array(),
                 value = ordered_json::array(), gain = ordered_json::array();
    for (const TreeNode& n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
      gain.push_back(n.gain);
    }
    trees.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left},
                     {"right", right},     {"value", value},         {"gain", gain}});
  }
  j["trees"] = trees;
  j["training_loss"] = model.training_loss;
  return j;
}

GbdtModel model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "qpt-gbdt") throw DataError("not a gbdt model section");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw DataError("unsupported gbdt format version " + std::to_string(version));
    }
    GbdtModel model;
    model.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    model.base_score = j.at("base_score").get<double>();
    model.layout = j.at("layout").get<std::vector<std::string>>();
    model.bins = BinMapper(j.at("bin_thresholds").get<std::vector<std::vector<double>>>());
    if (model.bins.num_features() != model.layout.size()) {
      throw DataError("bin thresholds do not match the model layout");
    }
    for (const auto& jt : j.at("trees")) {
      const auto feature = jt.at("feature").get<std::vector<int>>();
      const auto threshold = jt.at("threshold").get<std::vector<double>>();
      const auto left = jt.at("left").get<std::vector<int>>();
      const auto right = jt.at("right").get<std::vector<int>>();
      const auto value = jt.at("value").get<std::vector<double>>();
      const auto gain = jt.at("gain").get<std::vector<double>>();
      const std::size_t n = feature.size();
      if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n ||
          gain.size() != n) {
        throw DataError("tree node arrays have different lengths");
      }
      Tree t;
      for (std::size_t i = 0; i < n; ++i) {
        if (feature[i] >= static_cast<int>(model.layout.size()) || feature[i] < -1) {
          throw DataError("tree node references an unknown feature");
        }
        t.nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i], gain[i]});
      }
      if (!t.well_formed()) throw DataError("tree is not a proper binary tree");
      model.trees.push_back(std::move(t));
    }
    model.training_loss = j.value("training_loss", std::vector<double>{});
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed gbdt section: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed gbdt hyperparameters: ") + e.what());
  } catch (const InvariantError& e) {
    throw DataError(std::string("malformed gbdt section: ") + e.what());
  }
}

}  // namespace qpt
