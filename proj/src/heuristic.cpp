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

#include "qpt/heuristic.hpp"

#include <Eigen/Dense>
#include <array>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qpt/errors.hpp"

namespace qpt {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::size_t kTerms = 4;
// Floor for coefficients the formula requires to be strictly positive.
constexpr double kMinRate = 1e-12;

std::array<double, kTerms> regressors(const QuantumJob& job) noexcept {
  return {static_cast<double>(job.sum_shots), static_cast<double>(job.num_executions),
          static_cast<double>(job.num_batches), needs_noise_learning(job) ? 1.0 : 0.0};
}

}  // namespace

void HeuristicCoefficients::validate() const {
  if (!(per_shot_seconds > 0.0)) throw ConfigError("heuristic.per_shot_seconds must be positive");
  if (!(per_execution_seconds > 0.0)) {
    throw ConfigError("heuristic.per_execution_seconds must be positive");
  }
  if (!(per_batch_seconds >= 0.0)) throw ConfigError("heuristic.per_batch_seconds must be non-negative");
  if (!(overhead_factor >= 1.0)) throw ConfigError("heuristic.overhead_factor must be at least 1");
  if (!(noise_learning_seconds >= 0.0)) {
    throw ConfigError("heuristic.noise_learning_seconds must be non-negative");
  }
}

bool needs_noise_learning(const QuantumJob& job) noexcept {
  return job.has_twirling.value_or(false) || job.resilience_level.value_or(0) >= 1;
}

double heuristic_predict(const QuantumJob& job, const HeuristicCoefficients& c) noexcept {
  const double counted = static_cast<double>(job.sum_shots) * c.per_shot_seconds +
                         static_cast<double>(job.num_executions) * c.per_execution_seconds +
                         static_cast<double>(job.num_batches) * c.per_batch_seconds;
  return c.overhead_factor * counted + (needs_noise_learning(job) ? c.noise_learning_seconds : 0.0);
}

HeuristicCoefficients calibrate_heuristic(std::span<const QuantumJob> jobs) {
  if (jobs.empty()) throw DataError("cannot calibrate the heuristic on an empty job list");
  const auto n = static_cast<Eigen::Index>(jobs.size());
  Eigen::MatrixXd a(n, kTerms);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& job = jobs[static_cast<std::size_t>(i)];
    if (!(job.qpu_time_seconds > 0.0)) {
      throw DataError("job " + job.job_id + " has a non-positive qpu_time_seconds");
    }
    const auto x = regressors(job);
    for (std::size_t k = 0; k < kTerms; ++k) {
      a(i, static_cast<Eigen::Index>(k)) = x[k] / job.qpu_time_seconds;
    }
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

  std::array<bool, kTerms> active{};
  active.fill(true);
  std::array<double, kTerms> coef{};
  for (std::size_t pass = 0; pass < kTerms; ++pass) {
    std::vector<Eigen::Index> cols;
    for (std::size_t k = 0; k < kTerms; ++k) {
      if (active[k]) cols.push_back(static_cast<Eigen::Index>(k));
    }
    if (cols.empty()) break;
    Eigen::MatrixXd sub(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
    const Eigen::VectorXd sol = sub.colPivHouseholderQr().solve(ones);
    coef.fill(0.0);
    std::size_t most_negative = kTerms;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto k = static_cast<std::size_t>(cols[c]);
      coef[k] = sol(static_cast<Eigen::Index>(c));
      if (coef[k] < 0.0 && (most_negative == kTerms || coef[k] < coef[most_negative])) most_negative = k;
    }
    if (most_negative == kTerms) break;
    active[most_negative] = false;
    coef[most_negative] = 0.0;
  }

  HeuristicCoefficients c;
  c.overhead_factor = 1.0;
  c.per_shot_seconds = std::max(coef[0], kMinRate);
  c.per_execution_seconds = std::max(coef[1], kMinRate);
  c.per_batch_seconds = std::max(coef[2], 0.0);
  c.noise_learning_seconds = std::max(coef[3], 0.0);
  return c;
}

ordered_json heuristic_to_json(const HeuristicCoefficients& c) {
  ordered_json j;
  j["per_shot_seconds"] = c.per_shot_seconds;
  j["per_execution_seconds"] = c.per_execution_seconds;
  j["per_batch_seconds"] = c.per_batch_seconds;
  j["overhead_factor"] = c.overhead_factor;
  j["noise_learning_seconds"] = c.noise_learning_seconds;
  return j;
}

HeuristicCoefficients heuristic_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("heuristic section must be an object");
  HeuristicCoefficients c;
  for (const auto& item : j.items()) {
    double* field = nullptr;
    if (item.key() == "per_shot_seconds") field = &c.per_shot_seconds;
    if (item.key() == "per_execution_seconds") field = &c.per_execution_seconds;
    if (item.key() == "per_batch_seconds") field = &c.per_batch_seconds;
    if (item.key() == "overhead_factor") field = &c.overhead_factor;
    if (item.key() == "noise_learning_seconds") field = &c.noise_learning_seconds;
    if (field == nullptr) throw ConfigError("unknown key 'heuristic." + item.key() + "'");
    if (!item.value().is_number()) throw ConfigError("heuristic." + item.key() + " must be a number");
    *field = item.value().get<double>();
  }
  c.validate();
  return c;
}

}  // namespace qpt
