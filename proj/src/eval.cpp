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

#include "qpt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qpt/errors.hpp"
#include "qpt/format.hpp"
#include "qpt/simd/kernels.hpp"

namespace qpt {

using nlohmann::ordered_json;

std::string_view to_string(Method method) noexcept {
  return method == Method::ml ? "ml" : "heuristic";
}

double percent_error(double time_predicted, double time_taken) {
  if (!(time_taken > 0.0)) throw DataError("percent_error requires time_taken > 0");
  return std::abs((time_predicted - time_taken) / time_taken) * 100.0;
}

std::vector<double> default_thresholds() { return {20.0, 40.0, 60.0, 80.0, 100.0}; }

std::vector<double> factor_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("factor grid needs lo <= hi and step > 0");
  }
  std::vector<double> grid;
  for (long k = 0;; ++k) {
    const double f = std::round((lo + static_cast<double>(k) * step) * 1e9) / 1e9;
    if (f > hi + step * 1e-6) break;
    grid.push_back(f);
  }
  return grid;
}

std::vector<double> default_factor_grid() { return factor_grid(1.0, 8.0, 0.1); }

namespace {

std::vector<double> predictions(std::span<const EvaluationRecord> records, Method method) {
  std::vector<double> out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) out[i] = records[i].predicted(method);
  return out;
}

std::vector<double> actuals(std::span<const EvaluationRecord> records) {
  std::vector<double> out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!(records[i].actual_seconds > 0.0)) {
      throw DataError("record '" + records[i].job_id + "' has non-positive actual_seconds");
    }
    out[i] = records[i].actual_seconds;
  }
  return out;
}

}  // namespace

std::vector<double> accuracy_buckets(std::span<const EvaluationRecord> records, Method method,
                                     std::span<const double> thresholds) {
  if (records.empty()) throw DataError("accuracy_buckets needs at least one record");
  const std::vector<double> actual = actuals(records);
  const std::vector<double> pred = predictions(records, method);
  std::vector<double> errors(records.size());
  const auto& k = simd::kernels();
  k.percent_errors(pred.data(), actual.data(), errors.data(), errors.size());
  std::vector<double> out;
  out.reserve(thresholds.size());
  for (const double t : thresholds) {
    out.push_back(static_cast<double>(k.count_at_most(errors.data(), t, errors.size())) /
                  static_cast<double>(errors.size()));
  }
  return out;
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
  if (window == 0) throw ConfigError("moving average window must be at least 1");
  const std::size_t n = series.size();
  const std::size_t left = (window - 1) / 2;
  const std::size_t right = window / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(n, i + right + 1);
    double sum = 0.0;
    double mn = series[lo];
    double mx = series[lo];
    for (std::size_t j = lo; j < hi; ++j) {
      sum += series[j];
      mn = std::min(mn, series[j]);
      mx = std::max(mx, series[j]);
    }
    out[i] = std::clamp(sum / static_cast<double>(hi - lo), mn, mx);
  }
  return out;
}

std::vector<CurveRow> sorted_curve(std::span<const EvaluationRecord> records, std::size_t window) {
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].actual_seconds < records[b].actual_seconds;
  });
  std::vector<double> ml(order.size());
  std::vector<double> heuristic(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    ml[r] = records[order[r]].ml_predicted_seconds;
    heuristic[r] = records[order[r]].heuristic_predicted_seconds;
  }
  const std::vector<double> ml_ma = moving_average(ml, window);
  const std::vector<double> heuristic_ma = moving_average(heuristic, window);
  std::vector<CurveRow> rows(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const EvaluationRecord& rec = records[order[r]];
    rows[r] = CurveRow{r + 1, rec.job_id, rec.actual_seconds, ml[r], heuristic[r],
                       ml_ma[r], heuristic_ma[r], rec.primitive_id};
  }
  return rows;
}

std::vector<SweepPoint> safety_factor_sweep(std::span<const EvaluationRecord> records, Method method,
                                            std::span<const double> factors) {
  if (factors.empty()) throw ConfigError("safety factor grid is empty");
  for (const double f : factors) {
    if (!(f >= 1.0)) throw ConfigError("safety factors must be >= 1");
  }
  const std::vector<double> actual = actuals(records);
  const std::vector<double> pred = predictions(records, method);
  const auto& k = simd::kernels();
  std::vector<SweepPoint> out;
  out.reserve(factors.size());
  for (const double f : factors) {
    double pct = 0.0;
    if (!records.empty()) {
      pct = 100.0 * static_cast<double>(k.count_less_than_scaled(actual.data(), pred.data(), f,
                                                                 actual.size())) /
            static_cast<double>(actual.size());
    }
    out.push_back({f, pct});
  }
  return out;
}

double choose_safety_factor(std::span<const SweepPoint> sweep, double target_coverage) {
  if (!(target_coverage > 0.0 && target_coverage <= 1.0)) {
    throw ConfigError("target coverage must lie in (0, 1]");
  }
  const double needed = target_coverage * 100.0;
  const SweepPoint* best = nullptr;
  for (const SweepPoint& p : sweep) {
    if (p.percent_overestimated >= needed && (best == nullptr || p.factor < best->factor)) best = &p;
  }
  if (best == nullptr) throw DataError("no factor on the grid reaches the target coverage");
  return best->factor;
}

EvaluationReport build_report(std::span<const EvaluationRecord> records, const ReportOptions& options) {
  if (records.empty()) throw DataError("cannot evaluate an empty test set");
  if (!(options.target_coverage > 0.0 && options.target_coverage <= 1.0)) {
    throw ConfigError("eval.target_coverage must lie in (0, 1]");
  }
  EvaluationReport report;
  report.options = options;
  report.total_count = records.size();
  for (const Primitive primitive : {Primitive::sampler, Primitive::estimator}) {
    std::vector<EvaluationRecord> subset;
    for (const auto& r : records) {
      if (r.primitive_id == primitive) subset.push_back(r);
    }
    if (subset.empty()) continue;
    GroupReport g;
    g.primitive_id = primitive;
    g.count = subset.size();
    g.ml_buckets = accuracy_buckets(subset, Method::ml, options.thresholds);
    g.heuristic_buckets = accuracy_buckets(subset, Method::heuristic, options.thresholds);
    g.curve = sorted_curve(subset, options.moving_average_window);
    g.ml_sweep = safety_factor_sweep(subset, Method::ml, options.factors);
    g.heuristic_sweep = safety_factor_sweep(subset, Method::heuristic, options.factors);
    const auto choose = [&](const std::vector<SweepPoint>& sweep) -> std::optional<double> {
      try {
        return choose_safety_factor(sweep, options.target_coverage);
      } catch (const DataError&) {
        return std::nullopt;
      }
    };
    g.ml_safety_factor = choose(g.ml_sweep);
    g.heuristic_safety_factor = choose(g.heuristic_sweep);
    report.groups.push_back(std::move(g));
  }
  return report;
}

void write_curves_csv(std::ostream& out, const EvaluationReport& report) {
  out << "rank,actual_s,ml_pred_s,heuristic_pred_s,ml_ma50,heuristic_ma50,primitive_id\n";
  for (const auto& g : report.groups) {
    for (const auto& row : g.curve) {
      out << row.rank << ',' << format_double(row.actual_seconds) << ','
          << format_double(row.ml_predicted_seconds) << ','
          << format_double(row.heuristic_predicted_seconds) << ','
          << format_double(row.ml_moving_average) << ','
          << format_double(row.heuristic_moving_average) << ',' << to_string(row.primitive_id)
          << '\n';
    }
  }
}

void write_sweep_csv(std::ostream& out, const EvaluationReport& report) {
  out << "factor,ml_pct_over,heuristic_pct_over,primitive_id\n";
  for (const auto& g : report.groups) {
    for (std::size_t i = 0; i < g.ml_sweep.size(); ++i) {
      out << format_double(g.ml_sweep[i].factor) << ','
          << format_double(g.ml_sweep[i].percent_overestimated) << ','
          << format_double(g.heuristic_sweep[i].percent_overestimated) << ','
          << to_string(g.primitive_id) << '\n';
    }
  }
}

namespace {

ordered_json buckets_json(std::span<const double> thresholds, std::span<const double> fractions) {
  ordered_json j = ordered_json::object();
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    j["within_" + format_double(thresholds[i])] = fractions[i];
  }
  return j;
}

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json sweep_summary(const std::vector<SweepPoint>& sweep) {
  ordered_json j = ordered_json::object();
  for (const auto& p : sweep) {
    if (p.factor == std::floor(p.factor)) j["factor_" + format_double(p.factor)] = p.percent_overestimated;
  }
  return j;
}

}  // namespace

ordered_json report_to_json(const EvaluationReport& report, const ordered_json& config) {
  ordered_json j;
  j["format"] = "qpt-evaluation-report";
  j["version"] = kReportFormatVersion;
  j["counts"] = {{"total", report.total_count}};
  for (const auto& g : report.groups) j["counts"][std::string(to_string(g.primitive_id))] = g.count;
  j["thresholds"] = report.options.thresholds;
  j["target_coverage"] = report.options.target_coverage;
  j["moving_average_window"] = report.options.moving_average_window;
  ordered_json groups = ordered_json::array();
  for (const auto& g : report.groups) {
    ordered_json gj;
    gj["primitive_id"] = to_string(g.primitive_id);
    gj["count"] = g.count;
    gj["buckets"] = {{"ml", buckets_json(report.options.thresholds, g.ml_buckets)},
                     {"heuristic", buckets_json(report.options.thresholds, g.heuristic_buckets)}};
    gj["safety_factor"] = {{"ml", optional_json(g.ml_safety_factor)},
                           {"heuristic", optional_json(g.heuristic_safety_factor)}};
    gj["sweep_summary"] = {{"ml", sweep_summary(g.ml_sweep)},
                           {"heuristic", sweep_summary(g.heuristic_sweep)}};
    groups.push_back(std::move(gj));
  }
  j["groups"] = std::move(groups);
  j["config"] = config;
  return j;
}

}  // namespace qpt
