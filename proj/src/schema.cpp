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

#include "qpt/schema.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "qpt/errors.hpp"

namespace qpt {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 15> kColumns = {
    "job_id",         "backend",         "primitive_id",  "sum_shots",
    "sum_durations_per_pub", "num_pubs", "num_batches",   "num_executions",
    "has_options",    "has_circuits",    "has_twirling",  "resilience_level",
    "circuit_type",   "completed_at",    "qpu_time_seconds"};

constexpr std::array<std::string_view, 7> kNumericColumns = {
    "sum_shots",      "sum_durations_per_pub", "num_pubs", "num_batches",
    "num_executions", "resilience_level",      "qpu_time_seconds"};

std::optional<std::string> tri_to_string(const TriBool& v) {
  if (!v) return std::nullopt;
  return *v ? "true" : "false";
}

const json* find_present(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

const json& require(const json& j, const char* key) {
  const json* v = find_present(j, key);
  if (v == nullptr) throw DataError(std::string("missing required field '") + key + "'");
  return *v;
}

std::int64_t read_count(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number_integer()) throw DataError(std::string("field '") + key + "' must be an integer");
  const std::int64_t n = v.get<std::int64_t>();
  if (n < 0) throw DataError(std::string("field '") + key + "' must be non-negative");
  return n;
}

double read_real(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number()) throw DataError(std::string("field '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw DataError(std::string("field '") + key + "' must be finite");
  return x;
}

TriBool read_tri(const json& j, const char* key) {
  const json* v = find_present(j, key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_boolean()) throw DataError(std::string("field '") + key + "' must be a boolean or null");
  return v->get<bool>();
}

template <typename T>
ordered_json optional_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

std::string_view to_string(Primitive p) noexcept {
  return p == Primitive::sampler ? "sampler" : "estimator";
}

std::string_view to_string(CircuitType c) noexcept {
  switch (c) {
    case CircuitType::qpy:
      return "qpy";
    case CircuitType::qasm:
      return "qasm";
    case CircuitType::none:
      break;
  }
  return "None";
}

Primitive parse_primitive(std::string_view text) {
  if (text == "sampler") return Primitive::sampler;
  if (text == "estimator") return Primitive::estimator;
  throw DataError("unknown primitive_id '" + std::string(text) + "'");
}

CircuitType parse_circuit_type(std::string_view text) {
  if (text == "qpy") return CircuitType::qpy;
  if (text == "qasm") return CircuitType::qasm;
  if (text == "None") return CircuitType::none;
  throw DataError("unknown circuit_type '" + std::string(text) + "'");
}

bool is_job_column(std::string_view column) noexcept {
  return std::find(kColumns.begin(), kColumns.end(), column) != kColumns.end();
}

bool is_numeric_column(std::string_view column) noexcept {
  return std::find(kNumericColumns.begin(), kNumericColumns.end(), column) !=
         kNumericColumns.end();
}

std::optional<std::string> categorical_value(const QuantumJob& job, std::string_view column) {
  if (column == "job_id") return job.job_id;
  if (column == "backend") return job.backend;
  if (column == "primitive_id") return std::string(to_string(job.primitive_id));
  if (column == "has_options") return tri_to_string(job.has_options);
  if (column == "has_circuits") return tri_to_string(job.has_circuits);
  if (column == "has_twirling") return tri_to_string(job.has_twirling);
  if (column == "resilience_level") {
    if (!job.resilience_level) return std::nullopt;
    return std::to_string(*job.resilience_level);
  }
  if (column == "circuit_type") {
    if (!job.circuit_type) return std::nullopt;
    return std::string(to_string(*job.circuit_type));
  }
  if (column == "completed_at") return format_rfc3339(job.completed_at);
  if (column == "sum_shots") return std::to_string(job.sum_shots);
  if (column == "num_pubs") return std::to_string(job.num_pubs);
  if (column == "num_batches") return std::to_string(job.num_batches);
  if (column == "num_executions") return std::to_string(job.num_executions);
  throw ConfigError("column '" + std::string(column) + "' cannot be used as a categorical feature");
}

std::optional<double> numeric_value(const QuantumJob& job, std::string_view column) {
  if (column == "sum_shots") return static_cast<double>(job.sum_shots);
  if (column == "sum_durations_per_pub") return job.sum_durations_per_pub;
  if (column == "num_pubs") return static_cast<double>(job.num_pubs);
  if (column == "num_batches") return static_cast<double>(job.num_batches);
  if (column == "num_executions") return static_cast<double>(job.num_executions);
  if (column == "qpu_time_seconds") return job.qpu_time_seconds;
  if (column == "resilience_level") {
    if (!job.resilience_level) return std::nullopt;
    return static_cast<double>(*job.resilience_level);
  }
  throw ConfigError("column '" + std::string(column) + "' cannot be used as a numeric feature");
}

ordered_json job_to_json(const QuantumJob& job) {
  ordered_json j;
  j["job_id"] = job.job_id;
  j["backend"] = job.backend;
  j["primitive_id"] = to_string(job.primitive_id);
  j["sum_shots"] = job.sum_shots;
  j["sum_durations_per_pub"] = job.sum_durations_per_pub;
  j["num_pubs"] = job.num_pubs;
  j["num_batches"] = job.num_batches;
  j["num_executions"] = job.num_executions;
  j["has_options"] = optional_json(job.has_options);
  j["has_circuits"] = optional_json(job.has_circuits);
  j["has_twirling"] = optional_json(job.has_twirling);
  j["resilience_level"] = optional_json(job.resilience_level);
  j["circuit_type"] =
      job.circuit_type ? ordered_json(to_string(*job.circuit_type)) : ordered_json(nullptr);
  j["completed_at"] = format_rfc3339(job.completed_at);
  j["qpu_time_seconds"] = job.qpu_time_seconds;
  return j;
}

QuantumJob job_from_json(const json& j) {
  if (!j.is_object()) throw DataError("job record must be a JSON object");
  for (const auto& item : j.items()) {
    if (!is_job_column(item.key())) throw DataError("unknown field '" + item.key() + "'");
  }
  QuantumJob job;
  const json& id = require(j, "job_id");
  if (!id.is_string()) throw DataError("field 'job_id' must be a string");
  job.job_id = id.get<std::string>();
  const json& backend = require(j, "backend");
  if (!backend.is_string()) throw DataError("field 'backend' must be a string");
  job.backend = backend.get<std::string>();
  const json& prim = require(j, "primitive_id");
  if (!prim.is_string()) throw DataError("field 'primitive_id' must be a string");
  job.primitive_id = parse_primitive(prim.get<std::string>());
  job.sum_shots = read_count(j, "sum_shots");
  job.sum_durations_per_pub = read_real(j, "sum_durations_per_pub");
  if (job.sum_durations_per_pub < 0) throw DataError("field 'sum_durations_per_pub' must be non-negative");
  job.num_pubs = read_count(j, "num_pubs");
  job.num_batches = read_count(j, "num_batches");
  job.num_executions = read_count(j, "num_executions");
  job.has_options = read_tri(j, "has_options");
  job.has_circuits = read_tri(j, "has_circuits");
  job.has_twirling = read_tri(j, "has_twirling");
  if (const json* rl = find_present(j, "resilience_level")) {
    if (!rl->is_number_integer()) throw DataError("field 'resilience_level' must be an integer");
    const auto level = rl->get<std::int64_t>();
    if (level < 0 || level > 2) throw DataError("field 'resilience_level' must be 0, 1 or 2");
    job.resilience_level = static_cast<int>(level);
  }
  if (const json* ct = find_present(j, "circuit_type")) {
    if (!ct->is_string()) throw DataError("field 'circuit_type' must be a string");
    job.circuit_type = parse_circuit_type(ct->get<std::string>());
  }
  const json& ts = require(j, "completed_at");
  if (!ts.is_string()) throw DataError("field 'completed_at' must be an RFC 3339 string");
  job.completed_at = parse_rfc3339(ts.get<std::string>());
  job.qpu_time_seconds = read_real(j, "qpu_time_seconds");
  if (!(job.qpu_time_seconds > 0)) throw DataError("field 'qpu_time_seconds' must be positive");
  return job;
}

std::vector<QuantumJob> read_jobs(std::istream& in) {
  std::vector<QuantumJob> jobs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      jobs.push_back(job_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return jobs;
}

std::vector<QuantumJob> load_jobs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  return read_jobs(in);
}

void write_jobs(std::ostream& out, std::span<const QuantumJob> jobs) {
  for (const auto& job : jobs) out << job_to_json(job).dump() << '\n';
}

void save_jobs(const std::filesystem::path& path, std::span<const QuantumJob> jobs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  write_jobs(out, jobs);
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

DatasetSplit split_by_cutoff(std::span<const QuantumJob> jobs, Timestamp cutoff) {
  DatasetSplit split{cutoff, {}, {}};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    (jobs[i].completed_at <= cutoff ? split.train_indices : split.test_indices).push_back(i);
  }
  return split;
}

Timestamp cutoff_for_fraction(std::span<const QuantumJob> jobs, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1]");
  }
  if (jobs.empty()) throw DataError("cannot derive a cutoff from an empty dataset");
  std::vector<Timestamp> times;
  times.reserve(jobs.size());
  for (const auto& job : jobs) times.push_back(job.completed_at);
  std::sort(times.begin(), times.end());
  // The epsilon absorbs products like 0.94 * 1000 landing a hair above 940.
  auto rank = static_cast<std::size_t>(
      std::ceil(train_fraction * static_cast<double>(jobs.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, jobs.size());
  return times[rank - 1];
}

std::vector<double> recency_weights(std::span<const QuantumJob> jobs, Timestamp reference_time,
                                    double half_life_days) {
  if (!(half_life_days > 0.0) || !std::isfinite(half_life_days)) {
    throw ConfigError("half_life_days must be positive");
  }
  std::vector<double> weights;
  weights.reserve(jobs.size());
  for (const auto& job : jobs) {
    const std::int64_t age_s = reference_time.seconds - job.completed_at.seconds;
    if (age_s < 0) {
      throw DataError("job '" + job.job_id + "' completed after the weighting reference time");
    }
    const double age_days = static_cast<double>(age_s) / static_cast<double>(kSecondsPerDay);
    weights.push_back(std::exp2(-age_days / half_life_days));
  }
  return weights;
}

}  // namespace qpt
