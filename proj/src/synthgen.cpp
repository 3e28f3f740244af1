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

#include "qpt/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "qpt/errors.hpp"
#include "qpt/rng.hpp"

namespace qpt {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Independent streams for profiles and jobs, both derived from the one seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (stream * 0xD1B54A32D192ED03ULL);
  return splitmix64(state);
}

std::string backend_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "qpu_%02d", index);
  return buf;
}

template <typename T>
std::optional<T> maybe_missing(Rng& rng, double missing_fraction, T value) {
  if (rng.bernoulli(missing_fraction)) return std::nullopt;
  return value;
}

}  // namespace

void GeneratorConfig::validate() const {
  if (n_backends < 1) throw ConfigError("generator.n_backends must be positive");
  if (!(window_start < window_end)) throw ConfigError("generator.window_start must precede window_end");
  if (!(shots_log10_min < shots_log10_max) || shots_log10_min < 0.0 || shots_log10_max > 15.0) {
    throw ConfigError("generator.shots_log10_range must satisfy 0 <= min < max <= 15");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ConfigError("generator.noise_sigma must be non-negative");
  }
  if (!(missing_fraction >= 0.0 && missing_fraction <= 1.0)) {
    throw ConfigError("generator.missing_fraction must lie in [0, 1]");
  }
  if (!(estimator_fraction >= 0.0 && estimator_fraction <= 1.0)) {
    throw ConfigError("generator.estimator_fraction must lie in [0, 1]");
  }
  const auto& g = ground_truth;
  if (!(g.num_executions_factor >= 0.0) || !(g.batch_setup_seconds >= 0.0) ||
      !(g.noise_learning_seconds >= 0.0)) {
    throw ConfigError("generator.ground_truth coefficients must be non-negative");
  }
}

std::vector<BackendProfile> derive_profiles(const GeneratorConfig& config) {
  config.validate();
  Rng rng(stream_seed(config.seed, 1));
  std::vector<BackendProfile> out;
  std::set<double> used;
  for (int b = 0; b < config.n_backends; ++b) {
    BackendProfile p;
    p.name = backend_name(b);
    do {
      p.per_shot_seconds = std::pow(10.0, rng.uniform(-4.0, -3.0));
    } while (used.contains(p.per_shot_seconds));
    used.insert(p.per_shot_seconds);
    p.per_execution_overhead_seconds = rng.uniform(0.005, 0.1);
    p.base_rate_multiplier = rng.uniform(0.7, 1.6);
    out.push_back(std::move(p));
  }
  return out;
}

double ground_truth_time(const QuantumJob& job, const BackendProfile& profile,
                         const GroundTruthCoefficients& coeffs) {
  if (job.backend != profile.name) {
    throw DataError("profile '" + profile.name + "' does not describe backend '" + job.backend + "'");
  }
  const double hardware = profile.base_rate_multiplier *
                          (static_cast<double>(job.sum_shots) * profile.per_shot_seconds +
                           static_cast<double>(job.num_executions) * profile.per_execution_overhead_seconds);
  const bool noise_learning = job.has_twirling.value_or(false) || job.resilience_level.value_or(0) >= 1;
  const double t = hardware + job.sum_durations_per_pub * coeffs.num_executions_factor +
                   coeffs.batch_setup_seconds * static_cast<double>(job.num_batches) +
                   (noise_learning ? coeffs.noise_learning_seconds : 0.0);
  return std::max(t, kMinimumQpuSeconds);
}

GroundTruthOracle::GroundTruthOracle(const GeneratorConfig& config)
    : profiles_(derive_profiles(config)), coeffs_(config.ground_truth) {}

double GroundTruthOracle::operator()(const QuantumJob& job) const {
  const auto it = std::find_if(profiles_.begin(), profiles_.end(),
                               [&](const BackendProfile& p) { return p.name == job.backend; });
  if (it == profiles_.end()) throw DataError("no profile for backend '" + job.backend + "'");
  return ground_truth_time(job, *it, coeffs_);
}

std::vector<QuantumJob> generate(const GeneratorConfig& config, std::size_t n) {
  const std::vector<BackendProfile> profiles = derive_profiles(config);
  Rng rng(stream_seed(config.seed, 2));
  const double miss = config.missing_fraction;
  std::vector<QuantumJob> jobs;
  jobs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    QuantumJob job;
    char id[24];
    std::snprintf(id, sizeof id, "job_%07zu", i);
    job.job_id = id;
    const auto& profile =
        profiles[static_cast<std::size_t>(rng.uniform_int(0, config.n_backends - 1))];
    job.backend = profile.name;
    const bool estimator = rng.bernoulli(config.estimator_fraction);
    job.primitive_id = estimator ? Primitive::estimator : Primitive::sampler;

    job.num_pubs = estimator ? rng.uniform_int(1, 6) : rng.uniform_int(1, 10);
    job.sum_shots = std::max<std::int64_t>(
        1, std::llround(std::pow(10.0, rng.uniform(config.shots_log10_min, config.shots_log10_max))));
    job.num_executions = job.num_pubs * (estimator ? rng.uniform_int(20, 200) : rng.uniform_int(1, 20));
    // Estimator jobs are split into more batches.
    job.num_batches = estimator ? rng.uniform_int(2, 10) : rng.uniform_int(1, 3);
    job.sum_durations_per_pub = static_cast<double>(job.num_pubs) * (estimator ? rng.uniform(0.5, 5.0) : rng.uniform(0.05, 0.5));

    const bool circuits = rng.bernoulli(0.95);
    const bool twirling = rng.bernoulli(estimator ? 0.7 : 0.15);
    const bool options = twirling || rng.bernoulli(0.3);
    int resilience = 0;
    if (estimator) {
      const double u = rng.uniform();
      resilience = u < 0.2 ? 0 : (u < 0.7 ? 1 : 2);
    }
    const double u_circuit = rng.uniform();
    const CircuitType circuit_type =
        u_circuit < 0.7 ? CircuitType::qpy : (u_circuit < 0.9 ? CircuitType::qasm : CircuitType::none);
    job.has_circuits = maybe_missing(rng, miss, circuits);
    job.has_twirling = maybe_missing(rng, miss, twirling);
    job.has_options = maybe_missing(rng, miss, options);
    job.resilience_level = maybe_missing(rng, miss, resilience);
    job.circuit_type = maybe_missing(rng, miss, circuit_type);

    job.completed_at = Timestamp{rng.uniform_int(config.window_start.seconds, config.window_end.seconds)};
    const double z = rng.normal();
    job.qpu_time_seconds =
        ground_truth_time(job, profile, config.ground_truth) * std::exp(config.noise_sigma * z);
    jobs.push_back(std::move(job));
  }
  return jobs;
}

ordered_json generator_to_json(const GeneratorConfig& c) {
  ordered_json j;
  j["n_backends"] = c.n_backends;
  j["window_start"] = format_rfc3339(c.window_start);
  j["window_end"] = format_rfc3339(c.window_end);
  j["shots_log10_range"] = {c.shots_log10_min, c.shots_log10_max};
  j["noise_sigma"] = c.noise_sigma;
  j["missing_fraction"] = c.missing_fraction;
  j["estimator_fraction"] = c.estimator_fraction;
  j["seed"] = c.seed;
  j["ground_truth"] = {{"num_executions_factor", c.ground_truth.num_executions_factor},
                       {"batch_setup_seconds", c.ground_truth.batch_setup_seconds},
                       {"noise_learning_seconds", c.ground_truth.noise_learning_seconds}};
  return j;
}

GeneratorConfig generator_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("generator section must be an object");
  GeneratorConfig c;
  const auto number = [](const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key + " must be a number");
    return v.get<double>();
  };
  const auto timestamp = [](const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError(key + " must be an RFC 3339 string");
    try {
      return parse_rfc3339(v.get<std::string>());
    } catch (const DataError& e) {
      throw ConfigError(key + ": " + e.what());
    }
  };
  for (const auto& item : j.items()) {
    const std::string key = "generator." + item.key();
    const json& v = item.value();
    if (item.key() == "n_backends") {
      if (!v.is_number_integer()) throw ConfigError(key + " must be an integer");
      c.n_backends = v.get<int>();
    } else if (item.key() == "window_start") {
      c.window_start = timestamp(v, key);
    } else if (item.key() == "window_end") {
      c.window_end = timestamp(v, key);
    } else if (item.key() == "shots_log10_range") {
      if (!v.is_array() || v.size() != 2) throw ConfigError(key + " must be [min, max]");
      c.shots_log10_min = number(v[0], key);
      c.shots_log10_max = number(v[1], key);
    } else if (item.key() == "noise_sigma") {
      c.noise_sigma = number(v, key);
    } else if (item.key() == "missing_fraction") {
      c.missing_fraction = number(v, key);
    } else if (item.key() == "estimator_fraction") {
      c.estimator_fraction = number(v, key);
    } else if (item.key() == "seed") {
      if (!v.is_number_unsigned()) throw ConfigError(key + " must be a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (item.key() == "ground_truth") {
      if (!v.is_object()) throw ConfigError(key + " must be an object");
      for (const auto& g : v.items()) {
        const std::string gkey = key + "." + g.key();
        if (g.key() == "num_executions_factor") {
          c.ground_truth.num_executions_factor = number(g.value(), gkey);
        } else if (g.key() == "batch_setup_seconds") {
          c.ground_truth.batch_setup_seconds = number(g.value(), gkey);
        } else if (g.key() == "noise_learning_seconds") {
          c.ground_truth.noise_learning_seconds = number(g.value(), gkey);
        } else {
          throw ConfigError("unknown key '" + gkey + "'");
        }
      }
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

}  // namespace qpt
