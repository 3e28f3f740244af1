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

#include "qpt/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "CLI11.hpp"
#include "qpt/errors.hpp"
#include "qpt/format.hpp"
#include "qpt/synthgen.hpp"

namespace qpt::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

TrainOutcome train(const RunConfig& config, std::span<const QuantumJob> jobs,
                   std::optional<Timestamp> cutoff, int threads, bool reproducible) {
  config.validate();
  if (jobs.empty()) throw DataError("empty training set");
  if (!cutoff) cutoff = config.split.cutoff;
  if (!cutoff) cutoff = cutoff_for_fraction(jobs, config.split.train_fraction);

  TrainOutcome outcome;
  outcome.split = split_by_cutoff(jobs, *cutoff);
  if (outcome.split.train_indices.empty()) throw DataError("empty training set");
  const std::vector<QuantumJob> train_jobs = select(jobs, std::span<const std::size_t>(outcome.split.train_indices));

  ModelFile& m = outcome.model;
  m.pipeline = fit_pipeline(config.feature_specs, train_jobs);
  const FeatureMatrix x = transform(m.pipeline, train_jobs, threads);
  std::vector<double> y(train_jobs.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = train_jobs[i].qpu_time_seconds;
  const std::vector<double> w = recency_weights(train_jobs, *cutoff, config.half_life_days);
  m.gbdt = fit(x, y, w, config.model, threads);
  m.heuristic = config.calibrate_heuristic ? calibrate_heuristic(train_jobs) : config.heuristic;

  m.metadata.train_count = outcome.split.train_indices.size();
  m.metadata.test_count = outcome.split.test_indices.size();
  m.metadata.cutoff = *cutoff;
  m.metadata.config_hash = config_hash(config_to_json(config));
  if (!reproducible) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    m.metadata.created_at = Timestamp{std::chrono::duration_cast<std::chrono::seconds>(now).count()};
  }
  m.validate();
  return outcome;
}

std::vector<double> predict_jobs(const ModelFile& model, std::span<const QuantumJob> jobs, int threads) {
  model.validate();
  return predict(model.gbdt, transform(model.pipeline, jobs, threads), threads);
}

std::vector<EvaluationRecord> evaluation_records(const ModelFile& model, std::span<const QuantumJob> jobs,
                                                 const HeuristicCoefficients& fallback, int threads) {
  const std::vector<double> ml = predict_jobs(model, jobs, threads);
  const HeuristicCoefficients& h = model.heuristic ? *model.heuristic : fallback;
  std::vector<EvaluationRecord> records(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    records[i] = EvaluationRecord{jobs[i].job_id, jobs[i].qpu_time_seconds, ml[i],
                                  heuristic_predict(jobs[i], h), jobs[i].primitive_id};
  }
  return records;
}

std::vector<QuantumJob> test_side(std::span<const QuantumJob> jobs, Timestamp cutoff) {
  std::vector<QuantumJob> out;
  for (const auto& job : jobs) {
    if (job.completed_at > cutoff) out.push_back(job);
  }
  return out;
}

namespace {

struct Options {
  std::optional<std::string> config;
  std::optional<std::string> data;
  std::optional<std::string> model;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::size_t n = 50000;
  std::optional<std::string> cutoff;
  int threads = 1;
  bool reproducible = false;
};

std::optional<fs::path> as_path(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return fs::path(*s);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

void finish_output(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

std::optional<Timestamp> parse_cutoff(const std::optional<std::string>& text) {
  if (!text) return std::nullopt;
  try {
    return parse_rfc3339(*text);
  } catch (const DataError& e) {
    throw ConfigError(std::string("--cutoff: ") + e.what());
  }
}

RunConfig config_with_overrides(const Options& o) {
  RunConfig config = load_config(as_path(o.config));
  if (o.seed) {
    config.generator.seed = *o.seed;
    config.model.seed = *o.seed;
  }
  return config;
}

void cmd_generate(const Options& o, std::ostream& out) {
  const RunConfig config = config_with_overrides(o);
  const std::vector<QuantumJob> jobs = generate(config.generator, o.n);
  const fs::path path(*o.out);
  std::ofstream file = open_output(path);
  write_jobs(file, jobs);
  finish_output(file, path);
  out << "wrote " << jobs.size() << " jobs to " << path.string() << '\n';
}

void cmd_train(const Options& o, std::ostream& out) {
  const RunConfig config = config_with_overrides(o);
  const std::vector<QuantumJob> jobs = load_jobs(*o.data);
  const TrainOutcome t = train(config, jobs, parse_cutoff(o.cutoff), o.threads, o.reproducible);
  save_model_file(*o.out, t.model);
  out << "train " << t.split.train_indices.size() << " test " << t.split.test_indices.size()
      << " cutoff " << format_rfc3339(t.split.cutoff) << '\n';
  out << "final training loss " << format_double(t.model.gbdt.training_loss.back()) << '\n';
}

void cmd_predict(const Options& o, std::ostream& out) {
  const ModelFile model = load_model_file(*o.model);
  const std::vector<QuantumJob> jobs = load_jobs(*o.data);
  const std::vector<double> pred = predict_jobs(model, jobs, o.threads);
  const auto write = [&](std::ostream& os) {
    os << "job_id,predicted_s" << (model.heuristic ? ",heuristic_s" : "") << '\n';
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      os << jobs[i].job_id << ',' << format_double(pred[i]);
      if (model.heuristic) os << ',' << format_double(heuristic_predict(jobs[i], *model.heuristic));
      os << '\n';
    }
  };
  if (o.out) {
    std::ofstream file = open_output(*o.out);
    write(file);
    finish_output(file, *o.out);
  } else {
    write(out);
  }
}

EvaluationReport evaluate_test_side(const Options& o, const RunConfig& config, const ModelFile& model) {
  const std::vector<QuantumJob> jobs = load_jobs(*o.data);
  const Timestamp cutoff = parse_cutoff(o.cutoff).value_or(model.metadata.cutoff);
  const std::vector<QuantumJob> test = test_side(jobs, cutoff);
  if (test.empty()) throw DataError("empty test set: no job completes after " + format_rfc3339(cutoff));
  return build_report(evaluation_records(model, test, config.heuristic, o.threads), config.eval);
}

void print_summary(const EvaluationReport& report, std::ostream& out) {
  for (const auto& g : report.groups) {
    out << to_string(g.primitive_id) << " (" << g.count << " jobs)\n";
    for (std::size_t i = 0; i < report.options.thresholds.size(); ++i) {
      out << "  within " << format_double(report.options.thresholds[i]) << "%: ml "
          << format_double(g.ml_buckets[i]) << " heuristic " << format_double(g.heuristic_buckets[i])
          << '\n';
    }
    const auto factor = [](const std::optional<double>& f) {
      return f ? format_double(*f) : std::string("unreached");
    };
    out << "  safety factor: ml " << factor(g.ml_safety_factor) << " heuristic "
        << factor(g.heuristic_safety_factor) << '\n';
  }
}

void cmd_evaluate(const Options& o, std::ostream& out) {
  const RunConfig config = config_with_overrides(o);
  const ModelFile model = load_model_file(*o.model);
  const EvaluationReport report = evaluate_test_side(o, config, model);
  const fs::path dir(*o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir.string() + "'");
  ordered_json echo = config_to_json(config);
  echo["model_config_hash"] = model.metadata.config_hash;
  {
    std::ofstream f = open_output(dir / "report.json");
    f << report_to_json(report, echo).dump(2) << '\n';
    finish_output(f, dir / "report.json");
  }
  {
    std::ofstream f = open_output(dir / "curves.csv");
    write_curves_csv(f, report);
    finish_output(f, dir / "curves.csv");
  }
  {
    std::ofstream f = open_output(dir / "sweep.csv");
    write_sweep_csv(f, report);
    finish_output(f, dir / "sweep.csv");
  }
  print_summary(report, out);
}

void cmd_sweep_safety(const Options& o, std::ostream& out) {
  const RunConfig config = config_with_overrides(o);
  const ModelFile model = load_model_file(*o.model);
  const EvaluationReport report = evaluate_test_side(o, config, model);
  if (o.out) {
    std::ofstream f = open_output(*o.out);
    write_sweep_csv(f, report);
    finish_output(f, *o.out);
  } else {
    write_sweep_csv(out, report);
  }
  for (const auto& g : report.groups) {
    const auto factor = [](const std::optional<double>& f) {
      return f ? format_double(*f) : std::string("unreached");
    };
    out << "# " << to_string(g.primitive_id) << " target "
                        << format_double(report.options.target_coverage) << ": ml "
                        << factor(g.ml_safety_factor) << " heuristic "
                        << factor(g.heuristic_safety_factor) << '\n';
  }
}

void cmd_importance(const Options& o, std::ostream& out) {
  const ModelFile model = load_model_file(*o.model);
  const std::vector<double> gains = feature_importance(model.gbdt);
  std::vector<std::size_t> order(gains.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });
  out << "feature,gain\n";
  for (const std::size_t i : order) out << model.gbdt.layout[i] << ',' << format_double(gains[i]) << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Predict QPU processing time with gradient boosted trees and a formula heuristic"};
  app.require_subcommand(1);
  Options o;

  const auto config = [&](CLI::App* sub) { sub->add_option("--config", o.config, "JSON config file"); };
  const auto data = [&](CLI::App* sub, bool required) {
    sub->add_option("--data", o.data, "JSON-lines dataset")->required(required);
  };
  const auto model = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "model file")->required();
  };
  const auto threads = [&](CLI::App* sub) {
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  };
  const auto cutoff = [&](CLI::App* sub) {
    sub->add_option("--cutoff", o.cutoff, "RFC 3339 train/test cutoff (inclusive on the train side)");
  };

  CLI::App* gen = app.add_subcommand("generate", "write a synthetic dataset");
  config(gen);
  gen->add_option("--seed", o.seed, "generator seed override");
  gen->add_option("--n", o.n, "number of jobs");
  gen->add_option("--out", o.out, "output dataset")->required();

  CLI::App* tr = app.add_subcommand("train", "fit the pipeline, model and heuristic");
  config(tr);
  data(tr, true);
  tr->add_option("--out", o.out, "output model file")->required();
  tr->add_option("--seed", o.seed, "seed override");
  cutoff(tr);
  threads(tr);
  tr->add_flag("--reproducible", o.reproducible, "zero the creation timestamp");

  CLI::App* pr = app.add_subcommand("predict", "predict QPU time for a dataset");
  model(pr);
  data(pr, true);
  pr->add_option("--out", o.out, "output CSV (default stdout)");
  threads(pr);

  CLI::App* ev = app.add_subcommand("evaluate", "evaluate both methods on the test side");
  config(ev);
  model(ev);
  data(ev, true);
  ev->add_option("--out", o.out, "output directory")->required();
  cutoff(ev);
  threads(ev);
  ev->add_flag("--reproducible", o.reproducible, "accepted for symmetry; reports carry no timestamps");

  CLI::App* sw = app.add_subcommand("sweep-safety", "sweep multiplicative safety factors");
  config(sw);
  model(sw);
  data(sw, true);
  sw->add_option("--out", o.out, "output CSV (default stdout)");
  cutoff(sw);
  threads(sw);

  CLI::App* im = app.add_subcommand("importance", "print total split gain per feature");
  model(im);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "qpt: " << e.what() << '\n';
    return 1;
  }

  try {
    if (gen->parsed()) cmd_generate(o, out);
    if (tr->parsed()) cmd_train(o, out);
    if (pr->parsed()) cmd_predict(o, out);
    if (ev->parsed()) cmd_evaluate(o, out);
    if (sw->parsed()) cmd_sweep_safety(o, out);
    if (im->parsed()) cmd_importance(o, out);
  } catch (const std::exception& e) {
    err << "qpt: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 0;
}

}  // namespace qpt::cli
