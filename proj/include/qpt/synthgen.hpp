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
#include <vector>

#include "json.hpp"
#include "qpt/schema.hpp"

namespace qpt {

struct GroundTruthCoefficients {
  double num_executions_factor = 1.0;  // multiplies sum_durations_per_pub
  double batch_setup_seconds = 1.5;
  double noise_learning_seconds = 20.0;

  bool operator==(const GroundTruthCoefficients&) const = default;
};

struct GeneratorConfig {
  int n_backends = 10;
  Timestamp window_start = parse_rfc3339("2025-03-05T00:00:00Z");
  Timestamp window_end = parse_rfc3339("2025-03-21T23:59:59Z");
  double shots_log10_min = 2.0;
  double shots_log10_max = 6.0;
  double noise_sigma = 0.15;  // lognormal multiplicative noise scale
  double missing_fraction = 0.05;
  double estimator_fraction = 0.4;
  std::uint64_t seed = 42;
  GroundTruthCoefficients ground_truth;

  void validate() const;
  bool operator==(const GeneratorConfig&) const = default;
};

struct BackendProfile {
  std::string name;
  double per_shot_seconds = 0.0;
  double per_execution_overhead_seconds = 0.0;
  double base_rate_multiplier = 1.0;

  bool operator==(const BackendProfile&) const = default;
};

// Deterministic in config.seed; per_shot_seconds are pairwise distinct.
std::vector<BackendProfile> derive_profiles(const GeneratorConfig& config);

inline constexpr double kMinimumQpuSeconds = 0.001;

// base_rate_multiplier * (sum_shots * per_shot + num_executions * per_execution_overhead)
//   + sum_durations_per_pub * num_executions_factor
//   + batch_setup_seconds * num_batches
//   + noise_learning_seconds * [has_twirling == true or resilience_level >= 1],
// floored at kMinimumQpuSeconds. Missing options count as unset. Throws
// DataError if the profile is not the job's backend.
double ground_truth_time(const QuantumJob& job, const BackendProfile& profile,
                         const GroundTruthCoefficients& coeffs);

// Noiseless time for any job naming one of the configured backends.
class GroundTruthOracle {
 public:
  explicit GroundTruthOracle(const GeneratorConfig& config);
  double operator()(const QuantumJob& job) const;
  const std::vector<BackendProfile>& profiles() const noexcept { return profiles_; }

 private:
  std::vector<BackendProfile> profiles_;
  GroundTruthCoefficients coeffs_;
};

// n jobs; each qpu_time_seconds is ground_truth_time * exp(noise_sigma * Z)
// with Z drawn from the seeded stream. Pure function of (config, n).
std::vector<QuantumJob> generate(const GeneratorConfig& config, std::size_t n);

nlohmann::ordered_json generator_to_json(const GeneratorConfig& config);
// Unknown keys are ConfigErrors; missing keys keep their defaults.
GeneratorConfig generator_from_json(const nlohmann::json& j);

}  // namespace qpt
