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

#include "qpt/cli/config.hpp"

#include <cmath>
#include <fstream>

#include "qpt/errors.hpp"

namespace qpt::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + " must be a number");
  return v.get<double>();
}

std::vector<FeatureSpec> specs_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("feature_specs must be an array");
  std::vector<FeatureSpec> specs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& js = j[i];
    const std::string prefix = "feature_specs[" + std::to_string(i) + "]";
    if (!js.is_object()) throw ConfigError(prefix + " must be an object");
    FeatureSpec spec;
    bool has_column = false;
    for (const auto& item : js.items()) {
      const std::string key = prefix + "." + item.key();
      if (item.key() == "column") {
        if (!item.value().is_string()) throw ConfigError(key + " must be a string");
        spec.column = item.value().get<std::string>();
        has_column = true;
      } else if (item.key() == "kind") {
        if (!item.value().is_string()) throw ConfigError(key + " must be a string");
        try {
          spec.kind = parse_feature_kind(item.value().get<std::string>());
        } catch (const Error& e) {
          throw ConfigError(key + ": " + e.what());
        }
      } else if (item.key() == "ordinal_order") {
        if (!item.value().is_array()) throw ConfigError(key + " must be an array of strings");
        for (const auto& c : item.value()) {
          if (!c.is_string()) throw ConfigError(key + " must be an array of strings");
          spec.ordinal_order.push_back(c.get<std::string>());
        }
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    }
    if (!has_column) throw ConfigError(prefix + ".column is required");
    specs.push_back(std::move(spec));
  }
  return specs;
}

void heuristic_section(const json& j, RunConfig& c) {
  if (!j.is_object()) throw ConfigError("heuristic must be an object");
  for (const auto& item : j.items()) {
    if (item.key() == "calibrate") {
      if (!item.value().is_boolean()) throw ConfigError("heuristic.calibrate must be a boolean");
      c.calibrate_heuristic = item.value().get<bool>();
    } else if (item.key() == "coefficients") {
      c.heuristic = heuristic_from_json(item.value());
    } else {
      throw ConfigError("unknown key 'heuristic." + item.key() + "'");
    }
  }
}

void split_section(const json& j, RunConfig& c) {
  if (!j.is_object()) throw ConfigError("split must be an object");
  bool has_fraction = false;
  for (const auto& item : j.items()) {
    if (item.key() == "cutoff") {
      if (!item.value().is_string()) throw ConfigError("split.cutoff must be an RFC 3339 string");
      try {
        c.split.cutoff = parse_rfc3339(item.value().get<std::string>());
      } catch (const DataError& e) {
        throw ConfigError(std::string("split.cutoff: ") + e.what());
      }
    } else if (item.key() == "train_fraction") {
      c.split.train_fraction = number(item.value(), "split.train_fraction");
      has_fraction = true;
    } else {
      throw ConfigError("unknown key 'split." + item.key() + "'");
    }
  }
  if (has_fraction && c.split.cutoff) {
    throw ConfigError("split takes either cutoff or train_fraction, not both");
  }
}

void weighting_section(const json& j, RunConfig& c) {
  if (!j.is_object()) throw ConfigError("weighting must be an object");
  for (const auto& item : j.items()) {
    if (item.key() == "half_life_days") {
      c.half_life_days = number(item.value(), "weighting.half_life_days");
    } else {
      throw ConfigError("unknown key 'weighting." + item.key() + "'");
    }
  }
}

void eval_section(const json& j, RunConfig& c) {
  if (!j.is_object()) throw ConfigError("eval must be an object");
  for (const auto& item : j.items()) {
    const std::string key = "eval." + item.key();
    const json& v = item.value();
    if (item.key() == "thresholds") {
      if (!v.is_array() || v.empty()) throw ConfigError(key + " must be a non-empty array");
      c.eval.thresholds.clear();
      for (const auto& t : v) c.eval.thresholds.push_back(number(t, key));
    } else if (item.key() == "factor_grid") {
      if (!v.is_object()) throw ConfigError(key + " must be an object");
      for (const auto& g : v.items()) {
        const std::string gkey = key + "." + g.key();
        if (g.key() == "lo") {
          c.factor_grid_lo = number(g.value(), gkey);
        } else if (g.key() == "hi") {
          c.factor_grid_hi = number(g.value(), gkey);
        } else if (g.key() == "step") {
          c.factor_grid_step = number(g.value(), gkey);
        } else {
          throw ConfigError("unknown key '" + gkey + "'");
        }
      }
    } else if (item.key() == "target_coverage") {
      c.eval.target_coverage = number(v, key);
    } else if (item.key() == "moving_average_window") {
      if (!v.is_number_unsigned()) throw ConfigError(key + " must be a positive integer");
      c.eval.moving_average_window = v.get<std::size_t>();
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
}

}  // namespace

void RunConfig::validate() const {
  validate_feature_specs(feature_specs);
  if (feature_specs.empty()) throw ConfigError("feature_specs must not be empty");
  for (const auto& spec : feature_specs) {
    if (spec.column == target_column) {
      throw ConfigError("feature_specs must not include the target column");
    }
  }
  if (target_column != "qpu_time_seconds") {
    throw ConfigError("target_column must be 'qpu_time_seconds'");
  }
  model.validate();
  generator.validate();
  heuristic.validate();
  if (!(split.train_fraction > 0.0 && split.train_fraction <= 1.0)) {
    throw ConfigError("split.train_fraction must lie in (0, 1]");
  }
  if (!(half_life_days > 0.0) || !std::isfinite(half_life_days)) {
    throw ConfigError("weighting.half_life_days must be positive");
  }
  for (std::size_t i = 0; i < eval.thresholds.size(); ++i) {
    if (!(eval.thresholds[i] >= 0.0) || (i > 0 && !(eval.thresholds[i] > eval.thresholds[i - 1]))) {
      throw ConfigError("eval.thresholds must be non-negative and strictly increasing");
    }
  }
  if (eval.thresholds.empty()) throw ConfigError("eval.thresholds must not be empty");
  if (!(factor_grid_lo >= 1.0)) throw ConfigError("eval.factor_grid.lo must be >= 1");
  if (!(eval.target_coverage > 0.0 && eval.target_coverage <= 1.0)) {
    throw ConfigError("eval.target_coverage must lie in (0, 1]");
  }
  if (eval.moving_average_window < 1) throw ConfigError("eval.moving_average_window must be >= 1");
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  for (const auto& item : j.items()) {
    const json& v = item.value();
    if (item.key() == "feature_specs") {
      c.feature_specs = specs_from_json(v);
    } else if (item.key() == "target_column") {
      if (!v.is_string()) throw ConfigError("target_column must be a string");
      c.target_column = v.get<std::string>();
    } else if (item.key() == "model") {
      c.model = hyperparams_from_json(v);
    } else if (item.key() == "generator") {
      c.generator = generator_from_json(v);
    } else if (item.key() == "heuristic") {
      heuristic_section(v, c);
    } else if (item.key() == "split") {
      split_section(v, c);
    } else if (item.key() == "weighting") {
      weighting_section(v, c);
    } else if (item.key() == "eval") {
      eval_section(v, c);
    } else {
      throw ConfigError("unknown key '" + item.key() + "'");
    }
  }
  c.eval.factors = factor_grid(c.factor_grid_lo, c.factor_grid_hi, c.factor_grid_step);
  c.validate();
  return c;
}

ordered_json config_to_json(const RunConfig& c) {
  ordered_json j;
  ordered_json specs = ordered_json::array();
  for (const auto& spec : c.feature_specs) {
    ordered_json js;
    js["column"] = spec.column;
    js["kind"] = to_string(spec.kind);
    if (!spec.ordinal_order.empty()) js["ordinal_order"] = spec.ordinal_order;
    specs.push_back(std::move(js));
  }
  j["feature_specs"] = std::move(specs);
  j["target_column"] = c.target_column;
  j["model"] = hyperparams_to_json(c.model);
  j["generator"] = generator_to_json(c.generator);
  j["heuristic"] = {{"calibrate", c.calibrate_heuristic}, {"coefficients", heuristic_to_json(c.heuristic)}};
  if (c.split.cutoff) {
    j["split"] = {{"cutoff", format_rfc3339(*c.split.cutoff)}};
  } else {
    j["split"] = {{"train_fraction", c.split.train_fraction}};
  }
  j["weighting"] = {{"half_life_days", c.half_life_days}};
  j["eval"] = {{"thresholds", c.eval.thresholds},
               {"factor_grid", {{"lo", c.factor_grid_lo}, {"hi", c.factor_grid_hi}, {"step", c.factor_grid_step}}},
               {"target_coverage", c.eval.target_coverage},
               {"moving_average_window", c.eval.moving_average_window}};
  return j;
}

RunConfig load_config(const std::optional<std::filesystem::path>& path) {
  if (!path) {
    RunConfig c;
    c.validate();
    return c;
  }
  std::ifstream in(*path);
  if (!in) throw ConfigError("cannot open config '" + path->string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path->string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace qpt::cli
