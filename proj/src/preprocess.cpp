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

#include "qpt/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include "qpt/errors.hpp"
#include "qpt/format.hpp"
#include "qpt/parallel.hpp"
#include "qpt/simd/kernels.hpp"

namespace qpt {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string imputed_category(const QuantumJob& job, const FeatureSpec& spec,
                             const std::string& placeholder) {
  auto value = categorical_value(job, spec.column);
  return value ? std::move(*value) : placeholder;
}

std::size_t output_width(const FittedPipeline& p, std::size_t spec_index) {
  return p.specs[spec_index].kind == FeatureKind::onehot ? p.categories[spec_index].size() : 1;
}

// Writes one job's pre-scaling encoding into out[0 .. layout.size()).
void encode_row(const FittedPipeline& p, const QuantumJob& job, double* out) {
  std::size_t c = 0;
  for (std::size_t s = 0; s < p.specs.size(); ++s) {
    const FeatureSpec& spec = p.specs[s];
    const auto& cats = p.categories[s];
    switch (spec.kind) {
      case FeatureKind::numeric: {
        const auto v = numeric_value(job, spec.column);
        out[c++] = v ? *v : p.impute_numeric_constant;
        break;
      }
      case FeatureKind::onehot: {
        const std::string value = imputed_category(job, spec, p.impute_categorical_constant);
        const auto it = std::lower_bound(cats.begin(), cats.end(), value);
        for (std::size_t k = 0; k < cats.size(); ++k) out[c + k] = 0.0;
        if (it != cats.end() && *it == value) out[c + static_cast<std::size_t>(it - cats.begin())] = 1.0;
        c += cats.size();
        break;
      }
      case FeatureKind::ordinal: {
        const std::string value = imputed_category(job, spec, p.impute_categorical_constant);
        const auto it = std::find(cats.begin(), cats.end(), value);
        out[c++] = it == cats.end() ? -1.0 : static_cast<double>(it - cats.begin());
        break;
      }
    }
  }
}

}  // namespace

std::string_view to_string(FeatureKind kind) noexcept {
  switch (kind) {
    case FeatureKind::numeric:
      return "numeric";
    case FeatureKind::onehot:
      return "onehot";
    case FeatureKind::ordinal:
      break;
  }
  return "ordinal";
}

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "numeric") return FeatureKind::numeric;
  if (text == "onehot") return FeatureKind::onehot;
  if (text == "ordinal") return FeatureKind::ordinal;
  throw ConfigError("unknown feature kind '" + std::string(text) + "'");
}

std::vector<FeatureSpec> default_feature_specs() {
  return {
      {"primitive_id", FeatureKind::onehot, {}},
      {"has_circuits", FeatureKind::onehot, {}},
      {"has_options", FeatureKind::onehot, {}},
      {"has_twirling", FeatureKind::onehot, {}},
      {"backend", FeatureKind::ordinal, {}},
      {"resilience_level", FeatureKind::ordinal, {}},
      {"circuit_type", FeatureKind::ordinal, {}},
      {"sum_shots", FeatureKind::numeric, {}},
      {"sum_durations_per_pub", FeatureKind::numeric, {}},
      {"num_pubs", FeatureKind::numeric, {}},
      {"num_batches", FeatureKind::numeric, {}},
      {"num_executions", FeatureKind::numeric, {}},
  };
}

void validate_feature_specs(std::span<const FeatureSpec> specs) {
  std::set<std::string> seen;
  for (const auto& spec : specs) {
    if (!is_job_column(spec.column)) throw ConfigError("unknown feature column '" + spec.column + "'");
    if (spec.column == "qpu_time_seconds") {
      throw ConfigError("the target column cannot also be a feature");
    }
    if (!seen.insert(spec.column).second) {
      throw ConfigError("feature column '" + spec.column + "' listed twice");
    }
    if (spec.kind == FeatureKind::numeric && !is_numeric_column(spec.column)) {
      throw ConfigError("column '" + spec.column + "' is not numeric");
    }
    if (!spec.ordinal_order.empty()) {
      if (spec.kind != FeatureKind::ordinal) {
        throw ConfigError("ordinal_order given for non-ordinal column '" + spec.column + "'");
      }
      std::set<std::string> cats(spec.ordinal_order.begin(), spec.ordinal_order.end());
      if (cats.size() != spec.ordinal_order.size()) {
        throw ConfigError("ordinal_order for '" + spec.column + "' has duplicates");
      }
    }
  }
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = at(r, c);
  return out;
}

void write_feature_matrix_csv(std::ostream& out, const FeatureMatrix& x) {
  for (std::size_t c = 0; c < x.cols(); ++c) out << (c ? "," : "") << x.columns[c];
  out << '\n';
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out << (c ? "," : "") << format_double(x.at(r, c));
    out << '\n';
  }
}

FittedPipeline fit_pipeline(std::span<const FeatureSpec> specs, std::span<const QuantumJob> train,
                            const ImputeConstants& impute) {
  validate_feature_specs(specs);
  if (train.empty()) throw DataError("empty training set");

  FittedPipeline p;
  p.impute_numeric_constant = impute.numeric;
  p.impute_categorical_constant = impute.categorical;
  p.specs.assign(specs.begin(), specs.end());
  p.categories.resize(specs.size());

  for (std::size_t s = 0; s < specs.size(); ++s) {
    const FeatureSpec& spec = specs[s];
    if (spec.kind == FeatureKind::numeric) {
      p.layout.push_back(spec.column);
      continue;
    }
    if (spec.kind == FeatureKind::ordinal && !spec.ordinal_order.empty()) {
      p.categories[s] = spec.ordinal_order;
    } else {
      std::set<std::string> distinct;
      for (const auto& job : train) distinct.insert(imputed_category(job, spec, impute.categorical));
      p.categories[s].assign(distinct.begin(), distinct.end());
    }
    if (spec.kind == FeatureKind::onehot) {
      for (const auto& cat : p.categories[s]) p.layout.push_back(spec.column + "=" + cat);
    } else {
      p.layout.push_back(spec.column);
    }
  }

  const FeatureMatrix encoded = encode(p, train);
  const std::size_t n = encoded.rows;
  const std::size_t cols = encoded.cols();
  p.scaler.resize(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    const double first = encoded.at(0, c);
    bool constant = true;
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = encoded.at(r, c);
      constant = constant && v == first;
      sum += v;
    }
    if (constant) {
      p.scaler[c] = {first, 0.0};
      continue;
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d = encoded.at(r, c) - mean;
      ss += d * d;
    }
    p.scaler[c] = {mean, std::sqrt(ss / static_cast<double>(n))};
  }
  return p;
}

FeatureMatrix encode(const FittedPipeline& pipeline, std::span<const QuantumJob> jobs) {
  FeatureMatrix x;
  x.rows = jobs.size();
  x.columns = pipeline.layout;
  x.values.assign(x.rows * x.cols(), 0.0);
  std::size_t width = 0;
  for (std::size_t s = 0; s < pipeline.specs.size(); ++s) width += output_width(pipeline, s);
  if (width != x.cols()) throw InvariantError("pipeline layout does not match its feature specs");
  for (std::size_t r = 0; r < x.rows; ++r) encode_row(pipeline, jobs[r], x.values.data() + r * x.cols());
  return x;
}

FeatureMatrix transform(const FittedPipeline& pipeline, std::span<const QuantumJob> jobs,
                        int threads) {
  const std::size_t cols = pipeline.layout.size();
  if (pipeline.scaler.size() != cols) throw InvariantError("pipeline scaler does not match its layout");
  std::vector<double> means(cols);
  std::vector<double> stds(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    means[c] = pipeline.scaler[c].mean;
    stds[c] = pipeline.scaler[c].std;
  }
  FeatureMatrix x;
  x.rows = jobs.size();
  x.columns = pipeline.layout;
  x.values.assign(x.rows * cols, 0.0);
  const auto& k = simd::kernels();
  parallel_for(x.rows, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> raw(cols);
    for (std::size_t r = begin; r < end; ++r) {
      encode_row(pipeline, jobs[r], raw.data());
      k.standardize(raw.data(), means.data(), stds.data(), x.values.data() + r * cols, cols);
    }
  });
  return x;
}

ordered_json pipeline_to_json(const FittedPipeline& p) {
  ordered_json j;
  j["impute_numeric_constant"] = p.impute_numeric_constant;
  j["impute_categorical_constant"] = p.impute_categorical_constant;
  ordered_json specs = ordered_json::array();
  ordered_json onehot = ordered_json::object();
  ordered_json ordinal = ordered_json::object();
  for (std::size_t s = 0; s < p.specs.size(); ++s) {
    const FeatureSpec& spec = p.specs[s];
    ordered_json js;
    js["column"] = spec.column;
    js["kind"] = to_string(spec.kind);
    if (!spec.ordinal_order.empty()) js["ordinal_order"] = spec.ordinal_order;
    specs.push_back(js);
    if (spec.kind == FeatureKind::onehot) onehot[spec.column] = p.categories[s];
    if (spec.kind == FeatureKind::ordinal) {
      ordered_json ranks = ordered_json::object();
      for (std::size_t k = 0; k < p.categories[s].size(); ++k) ranks[p.categories[s][k]] = k;
      ordinal[spec.column] = ranks;
    }
  }
  j["specs"] = specs;
  j["onehot_tables"] = onehot;
  j["ordinal_tables"] = ordinal;
  ordered_json scaler = ordered_json::array();
  for (const auto& s : p.scaler) scaler.push_back({{"mean", s.mean}, {"std", s.std}});
  j["scaler"] = scaler;
  j["layout"] = p.layout;
  return j;
}

FittedPipeline pipeline_from_json(const json& j) {
  try {
    FittedPipeline p;
    p.impute_numeric_constant = j.at("impute_numeric_constant").get<double>();
    p.impute_categorical_constant = j.at("impute_categorical_constant").get<std::string>();
    for (const auto& js : j.at("specs")) {
      FeatureSpec spec;
      spec.column = js.at("column").get<std::string>();
      spec.kind = parse_feature_kind(js.at("kind").get<std::string>());
      if (js.contains("ordinal_order")) spec.ordinal_order = js["ordinal_order"].get<std::vector<std::string>>();
      p.specs.push_back(std::move(spec));
    }
    validate_feature_specs(p.specs);
    for (const auto& spec : p.specs) {
      std::vector<std::string> cats;
      if (spec.kind == FeatureKind::onehot) {
        cats = j.at("onehot_tables").at(spec.column).get<std::vector<std::string>>();
        if (!std::is_sorted(cats.begin(), cats.end())) {
          throw DataError("one-hot table for '" + spec.column + "' is not sorted");
        }
      } else if (spec.kind == FeatureKind::ordinal) {
        const json& ranks = j.at("ordinal_tables").at(spec.column);
        cats.resize(ranks.size());
        std::vector<bool> filled(ranks.size(), false);
        for (const auto& item : ranks.items()) {
          const auto rank = item.value().get<std::size_t>();
          if (rank >= cats.size() || filled[rank]) {
            throw DataError("ordinal ranks for '" + spec.column + "' are not 0..n-1");
          }
          cats[rank] = item.key();
          filled[rank] = true;
        }
      }
      p.categories.push_back(std::move(cats));
    }
    for (const auto& s : j.at("scaler")) {
      const ColumnScaler sc{s.at("mean").get<double>(), s.at("std").get<double>()};
      if (!(sc.std >= 0.0)) throw DataError("negative scaler std");
      p.scaler.push_back(sc);
    }
    p.layout = j.at("layout").get<std::vector<std::string>>();
    if (p.layout.size() != p.scaler.size()) throw DataError("pipeline layout and scaler sizes differ");
    std::size_t width = 0;
    for (std::size_t s = 0; s < p.specs.size(); ++s) width += output_width(p, s);
    if (width != p.layout.size()) throw DataError("pipeline layout does not match its feature specs");
    return p;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed pipeline section: ") + e.what());
  }
}

}  // namespace qpt
