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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpt/eval.hpp"
#include "qpt/gbdt.hpp"
#include "qpt/heuristic.hpp"
#include "qpt/preprocess.hpp"
#include "qpt/synthgen.hpp"

namespace qpt::cli {

struct SplitConfig {
  std::optional<Timestamp> cutoff;  // takes precedence over train_fraction
  double train_fraction = 0.94;
};

// The single JSON configuration document. Every section is optional and
// unknown keys at any level are ConfigErrors.
//
//   {
//     "feature_specs": [{"column": "backend", "kind": "ordinal"}, ...],
//     "target_column": "qpu_time_seconds",
//     "model": {"n_estimators": 200, ...},
//     "generator": {"n_backends": 10, ..., "ground_truth": {...}},
//     "heuristic": {"calibrate": true, "coefficients": {...}},
//     "split": {"train_fraction": 0.94} or {"cutoff": "2025-03-20T00:00:00Z"},
//     "weighting": {"half_life_days": 7},
//     "eval": {"thresholds": [...], "factor_grid": {"lo": 1, "hi": 8, "step": 0.1},
//              "target_coverage": 0.99, "moving_average_window": 50}
//   }
struct RunConfig {
  std::vector<FeatureSpec> feature_specs = default_feature_specs();
  std::string target_column = "qpu_time_seconds";
  Hyperparams model;
  GeneratorConfig generator;
  bool calibrate_heuristic = true;
  HeuristicCoefficients heuristic;
  SplitConfig split;
  double half_life_days = 7.0;
  ReportOptions eval;
  double factor_grid_lo = 1.0;
  double factor_grid_hi = 8.0;
  double factor_grid_step = 0.1;

  void validate() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const RunConfig& config);
// A missing path gives the defaults.
RunConfig load_config(const std::optional<std::filesystem::path>& path);

}  // namespace qpt::cli
