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
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qpt/schema.hpp"

namespace qpt {

enum class FeatureKind { numeric, onehot, ordinal };

std::string_view to_string(FeatureKind kind) noexcept;
FeatureKind parse_feature_kind(std::string_view text);

struct FeatureSpec {
  std::string column;
  FeatureKind kind = FeatureKind::numeric;
  // Explicit category ranks for ordinal features; empty means alphabetical.
  std::vector<std::string> ordinal_order;

  bool operator==(const FeatureSpec&) const = default;
};

// One-hot: primitive_id, has_circuits, has_options, has_twirling.
// Ordinal: backend, resilience_level, circuit_type.
// Numeric: sum_shots, sum_durations_per_pub, num_pubs, num_batches, num_executions.
std::vector<FeatureSpec> default_feature_specs();

// Throws ConfigError on unknown columns, duplicates, or a repeated ordinal category.
void validate_feature_specs(std::span<const FeatureSpec> specs);

struct FeatureMatrix {
  std::size_t rows = 0;
  std::vector<std::string> columns;
  std::vector<double> values;  // row-major, rows * columns.size()

  std::size_t cols() const noexcept { return columns.size(); }
  double at(std::size_t r, std::size_t c) const noexcept { return values[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {values.data() + r * cols(), cols()};
  }
  std::vector<double> column(std::size_t c) const;
};

void write_feature_matrix_csv(std::ostream& out, const FeatureMatrix& x);

struct ColumnScaler {
  double mean = 0.0;
  double std = 0.0;

  bool operator==(const ColumnScaler&) const = default;
};

// Imputation constants, category tables, scaler statistics and output layout,
// all learned from the training jobs alone.
struct FittedPipeline {
  double impute_numeric_constant = -1.0;
  std::string impute_categorical_constant = "NA";
  std::vector<FeatureSpec> specs;
  // Per spec. One-hot: categories in ascending byte order. Ordinal: index is
  // the rank. Numeric: empty.
  std::vector<std::vector<std::string>> categories;
  std::vector<ColumnScaler> scaler;  // per output column
  std::vector<std::string> layout;   // output column labels

  bool is_constant(std::size_t column) const noexcept { return scaler[column].std == 0.0; }
  bool operator==(const FittedPipeline&) const = default;
};

struct ImputeConstants {
  double numeric = -1.0;
  std::string categorical = "NA";
};

FittedPipeline fit_pipeline(std::span<const FeatureSpec> specs, std::span<const QuantumJob> train,
                            const ImputeConstants& impute = {});

// Imputed and encoded but not standardized. Unknown one-hot categories give
// an all-zero group; unknown ordinal categories give -1.
FeatureMatrix encode(const FittedPipeline& pipeline, std::span<const QuantumJob> jobs);

// encode() followed by (v - mean) / std per column; constant columns map to 0.
// Rows are independent, so `threads` only changes wall time.
FeatureMatrix transform(const FittedPipeline& pipeline, std::span<const QuantumJob> jobs,
                        int threads = 1);

nlohmann::ordered_json pipeline_to_json(const FittedPipeline& pipeline);
FittedPipeline pipeline_from_json(const nlohmann::json& j);

}  // namespace qpt
