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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qpt/schema.hpp"

namespace qpt {

enum class Method { ml, heuristic };

std::string_view to_string(Method method) noexcept;

struct EvaluationRecord {
  std::string job_id;
  double actual_seconds = 0.0;
  double ml_predicted_seconds = 0.0;
  double heuristic_predicted_seconds = 0.0;
  Primitive primitive_id = Primitive::sampler;

  double predicted(Method method) const noexcept {
    return method == Method::ml ? ml_predicted_seconds : heuristic_predicted_seconds;
  }
};

// |(time_predicted - time_taken) / time_taken| * 100. Throws DataError unless
// time_taken > 0.
double percent_error(double time_predicted, double time_taken);

std::vector<double> default_thresholds();  // 20, 40, 60, 80, 100
// lo, lo + step, ..., hi; each value rounded to 9 decimals so the grid prints cleanly.
std::vector<double> factor_grid(double lo, double hi, double step);
std::vector<double> default_factor_grid();  // 1.0 to 8.0 step 0.1

// Fraction of records whose percent error is <= each threshold. Throws
// DataError on empty records.
std::vector<double> accuracy_buckets(std::span<const EvaluationRecord> records, Method method,
                                     std::span<const double> thresholds);

// Centered, edge-truncated mean: out[i] averages series[i - (window - 1) / 2]
// through series[i + window / 2], clipped to the series bounds.
std::vector<double> moving_average(std::span<const double> series, std::size_t window = 50);

struct CurveRow {
  std::size_t rank = 0;  // 1-based position after sorting
  std::string job_id;
  double actual_seconds = 0.0;
  double ml_predicted_seconds = 0.0;
  double heuristic_predicted_seconds = 0.0;
  double ml_moving_average = 0.0;
  double heuristic_moving_average = 0.0;
  Primitive primitive_id = Primitive::sampler;
};

// Stable ascending sort by actual_seconds, with moving averages of both
// prediction series taken in sorted order.
std::vector<CurveRow> sorted_curve(std::span<const EvaluationRecord> records,
                                   std::size_t window = 50);

struct SweepPoint {
  double factor = 1.0;
  double percent_overestimated = 0.0;  // % of records with actual < factor * predicted
};

// Throws ConfigError on an empty grid or a factor below 1.
std::vector<SweepPoint> safety_factor_sweep(std::span<const EvaluationRecord> records, Method method,
                                            std::span<const double> factors);

// Smallest factor reaching target_coverage * 100 percent. Throws ConfigError
// unless 0 < target_coverage <= 1, DataError if no factor reaches it.
double choose_safety_factor(std::span<const SweepPoint> sweep, double target_coverage);

struct GroupReport {
  Primitive primitive_id = Primitive::sampler;
  std::size_t count = 0;
  std::vector<double> ml_buckets;
  std::vector<double> heuristic_buckets;
  std::vector<CurveRow> curve;
  std::vector<SweepPoint> ml_sweep;
  std::vector<SweepPoint> heuristic_sweep;
  std::optional<double> ml_safety_factor;  // empty when the grid never reaches coverage
  std::optional<double> heuristic_safety_factor;
};

struct ReportOptions {
  std::vector<double> thresholds = default_thresholds();
  std::vector<double> factors = default_factor_grid();
  double target_coverage = 0.99;
  std::size_t moving_average_window = 50;
};

struct EvaluationReport {
  ReportOptions options;
  std::size_t total_count = 0;
  std::vector<GroupReport> groups;  // sampler then estimator, present groups only
};

// Throws DataError on empty records.
EvaluationReport build_report(std::span<const EvaluationRecord> records,
                              const ReportOptions& options = {});

inline constexpr int kReportFormatVersion = 1;

// rank,actual_s,ml_pred_s,heuristic_pred_s,ml_ma50,heuristic_ma50,primitive_id
void write_curves_csv(std::ostream& out, const EvaluationReport& report);
// factor,ml_pct_over,heuristic_pct_over,primitive_id
void write_sweep_csv(std::ostream& out, const EvaluationReport& report);
// `config` is echoed verbatim under "config".
nlohmann::ordered_json report_to_json(const EvaluationReport& report,
                                      const nlohmann::ordered_json& config = nullptr);

}  // namespace qpt
