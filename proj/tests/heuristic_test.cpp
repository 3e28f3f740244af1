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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>

#include "qpt/errors.hpp"
#include "qpt/rng.hpp"
#include "support/random_jobs.hpp"

namespace qpt {
namespace {

TEST(HeuristicPredict, ZeroCountsWithoutNoiseLearningIsZero) {
  QuantumJob job;
  job.resilience_level = 0;
  EXPECT_EQ(heuristic_predict(job, {}), 0.0);
  job.resilience_level.reset();
  EXPECT_EQ(heuristic_predict(job, {}), 0.0);
}

TEST(HeuristicPredict, WorkedExample) {
  QuantumJob job;
  job.sum_shots = 10000;
  job.num_executions = 100;
  job.num_batches = 2;
  job.has_twirling = true;
  const HeuristicCoefficients c{1e-4, 0.01, 0.5, 1.2, 30.0};
  EXPECT_DOUBLE_EQ(heuristic_predict(job, c), 33.6);
}

TEST(HeuristicPredict, IgnoresBackend) {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    QuantumJob a = testing::random_job(rng, static_cast<std::size_t>(i));
    QuantumJob b = a;
    b.backend = "some_other_machine";
    EXPECT_EQ(heuristic_predict(a, {}), heuristic_predict(b, {}));
  }
}

TEST(HeuristicPredict, MonotoneInCountsAndLinearInOverhead) {
  Rng rng(2);
  const HeuristicCoefficients c;
  for (int i = 0; i < 500; ++i) {
    const QuantumJob job = testing::random_job(rng, static_cast<std::size_t>(i));
    const double base = heuristic_predict(job, c);
    for (const int field : {0, 1, 2}) {
      QuantumJob more = job;
      (field == 0 ? more.sum_shots : field == 1 ? more.num_executions : more.num_batches) += rng.uniform_int(1, 1000);
      EXPECT_GE(heuristic_predict(more, c), base);
    }
    HeuristicCoefficients unit = c;
    unit.overhead_factor = 1.0;
    unit.noise_learning_seconds = 0.0;
    HeuristicCoefficients scaled = unit;
    scaled.overhead_factor = 3.7;
    EXPECT_EQ(heuristic_predict(job, scaled), 3.7 * heuristic_predict(job, unit));
  }
}

TEST(CalibrateHeuristic, RecoversExactLinearLaw) {
  auto jobs = testing::random_jobs(3, 400);
  const HeuristicCoefficients truth{3e-4, 0.05, 2.0, 1.0, 15.0};
  for (auto& j : jobs) {
    j.sum_shots = std::max<std::int64_t>(j.sum_shots, 1);
    j.qpu_time_seconds = heuristic_predict(j, truth);
  }
  const auto c = calibrate_heuristic(jobs);
  EXPECT_NEAR(c.per_shot_seconds, truth.per_shot_seconds, 1e-12);
  EXPECT_NEAR(c.per_execution_seconds, truth.per_execution_seconds, 1e-10);
  EXPECT_NEAR(c.per_batch_seconds, truth.per_batch_seconds, 1e-8);
  EXPECT_NEAR(c.noise_learning_seconds, truth.noise_learning_seconds, 1e-8);
  EXPECT_EQ(c.overhead_factor, 1.0);
  EXPECT_NO_THROW(c.validate());
}

TEST(CalibrateHeuristic, KeepsCoefficientsNonNegative) {
  auto jobs = testing::random_jobs(4, 300);
  // Time falls with the batch count.
  for (auto& j : jobs) j.qpu_time_seconds = 100.0 + 1e-4 * j.sum_shots - 5.0 * static_cast<double>(j.num_batches);
  const auto c = calibrate_heuristic(jobs);
  EXPECT_GT(c.per_shot_seconds, 0.0);
  EXPECT_GT(c.per_execution_seconds, 0.0);
  EXPECT_GE(c.per_batch_seconds, 0.0);
  EXPECT_GE(c.noise_learning_seconds, 0.0);
  EXPECT_NO_THROW(c.validate());
  EXPECT_THROW(calibrate_heuristic({}), DataError);
  jobs[7].qpu_time_seconds = 0.0;
  EXPECT_THROW(calibrate_heuristic(jobs), DataError);
}

TEST(HeuristicJson, RoundTripAndValidation) {
  const HeuristicCoefficients c{1e-4, 0.01, 0.5, 1.2, 30.0};
  EXPECT_EQ(heuristic_from_json(nlohmann::json::parse(heuristic_to_json(c).dump())), c);
  EXPECT_THROW(heuristic_from_json(nlohmann::json::parse(R"({"per_shot": 1})")), ConfigError);
  EXPECT_THROW(heuristic_from_json(nlohmann::json::parse(R"({"overhead_factor": 0.5})")), ConfigError);
  EXPECT_THROW(heuristic_from_json(nlohmann::json::parse(R"({"per_shot_seconds": 0})")), ConfigError);
}

}  // namespace
}  // namespace qpt
