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

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "qpt/cli/config.hpp"
#include "qpt/cli/model_file.hpp"
#include "qpt/eval.hpp"
#include "qpt/schema.hpp"

namespace qpt::cli {

struct TrainOutcome {
  ModelFile model;
  DatasetSplit split;
};

// Splits at `cutoff` (or the configured split), weights the training side by
// recency relative to the cutoff, fits the pipeline and the model on it, and
// calibrates the heuristic when configured. Throws DataError "empty training
// set" when no job falls on the train side.
TrainOutcome train(const RunConfig& config, std::span<const QuantumJob> jobs,
                   std::optional<Timestamp> cutoff, int threads, bool reproducible);

std::vector<double> predict_jobs(const ModelFile& model, std::span<const QuantumJob> jobs,
                                 int threads);

// The heuristic column uses the model file's coefficients when present and
// `fallback` otherwise.
std::vector<EvaluationRecord> evaluation_records(const ModelFile& model,
                                                 std::span<const QuantumJob> jobs,
                                                 const HeuristicCoefficients& fallback,
                                                 int threads);

// Jobs completed strictly after the cutoff, in input order.
std::vector<QuantumJob> test_side(std::span<const QuantumJob> jobs, Timestamp cutoff);

// Entry point for the qpt binary. Returns the process exit code: 0 success,
// 1 usage or config error, 2 data error, 3 invariant violation.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qpt::cli
