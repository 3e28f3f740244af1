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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qpt/timestamp.hpp"

namespace qpt {

enum class Primitive { sampler, estimator };
enum class CircuitType { qpy, qasm, none };

std::string_view to_string(Primitive p) noexcept;
std::string_view to_string(CircuitType c) noexcept;  // "qpy", "qasm", "None"
Primitive parse_primitive(std::string_view text);
CircuitType parse_circuit_type(std::string_view text);

// true / false / missing.
using TriBool = std::optional<bool>;

// One job's metadata plus its measured QPU time.
struct QuantumJob {
  std::string job_id;
  std::string backend;
  Primitive primitive_id = Primitive::sampler;
  std::int64_t sum_shots = 0;
  double sum_durations_per_pub = 0.0;
  std::int64_t num_pubs = 0;
  std::int64_t num_batches = 0;
  std::int64_t num_executions = 0;
  TriBool has_options;
  TriBool has_circuits;
  TriBool has_twirling;
  std::optional<int> resilience_level;
  std::optional<CircuitType> circuit_type;
  Timestamp completed_at;
  double qpu_time_seconds = 0.0;

  bool operator==(const QuantumJob&) const = default;
};

// Column access by field name, used by the feature pipeline. Missing values
// come back as std::nullopt.
bool is_job_column(std::string_view column) noexcept;
bool is_numeric_column(std::string_view column) noexcept;
std::optional<std::string> categorical_value(const QuantumJob& job, std::string_view column);
std::optional<double> numeric_value(const QuantumJob& job, std::string_view column);

// JSON-lines dataset format. Field names match QuantumJob; an absent key or
// null means missing.
nlohmann::ordered_json job_to_json(const QuantumJob& job);
QuantumJob job_from_json(const nlohmann::json& j);

std::vector<QuantumJob> read_jobs(std::istream& in);
std::vector<QuantumJob> load_jobs(const std::filesystem::path& path);
void write_jobs(std::ostream& out, std::span<const QuantumJob> jobs);
void save_jobs(const std::filesystem::path& path, std::span<const QuantumJob> jobs);

struct DatasetSplit {
  Timestamp cutoff;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Jobs completed at or before the cutoff train; later jobs test.
DatasetSplit split_by_cutoff(std::span<const QuantumJob> jobs, Timestamp cutoff);

// Timestamp of the ceil(fraction * n)-th job in completion order, so that an
// inclusive split at it puts (at least) that fraction on the train side.
Timestamp cutoff_for_fraction(std::span<const QuantumJob> jobs, double train_fraction);

// weight = 0.5 ^ (age_days / half_life_days), age measured back from
// reference_time. Throws DataError if any job completes after reference_time.
std::vector<double> recency_weights(std::span<const QuantumJob> jobs, Timestamp reference_time,
                                    double half_life_days);

template <typename T>
std::vector<T> select(std::span<const T> items, std::span<const std::size_t> indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (const std::size_t i : indices) out.push_back(items[i]);
  return out;
}

}  // namespace qpt
