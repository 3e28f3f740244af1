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

#include <span>

#include "json.hpp"
#include "qpt/schema.hpp"

namespace qpt {

// Backend-agnostic formula baseline:
//
//   overhead_factor * (sum_shots * per_shot_seconds
//                      + num_executions * per_execution_seconds
//                      + num_batches * per_batch_seconds)
//   + noise_learning_seconds * [has_twirling == true or resilience_level >= 1]
struct HeuristicCoefficients {
  double per_shot_seconds = 2.5e-4;
  double per_execution_seconds = 0.02;
  double per_batch_seconds = 1.5;
  double overhead_factor = 1.2;
  double noise_learning_seconds = 20.0;

  void validate() const;
  bool operator==(const HeuristicCoefficients&) const = default;
};

bool needs_noise_learning(const QuantumJob& job) noexcept;

double heuristic_predict(const QuantumJob& job, const HeuristicCoefficients& c) noexcept;

// Fits per_shot, per_execution, per_batch and noise_learning seconds (with
// overhead_factor = 1) by least squares on relative error, sum ((p - y) / y)^2,
// constrained to non-negative values by dropping the most negative term and
// refitting. Throws DataError on an empty job list.
HeuristicCoefficients calibrate_heuristic(std::span<const QuantumJob> jobs);

nlohmann::ordered_json heuristic_to_json(const HeuristicCoefficients& c);
// Unknown keys are ConfigErrors; missing keys keep their defaults.
HeuristicCoefficients heuristic_from_json(const nlohmann::json& j);

}  // namespace qpt
