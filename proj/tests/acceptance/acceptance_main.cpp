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

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qpt/cli/commands.hpp"
#include "qpt/errors.hpp"
#include "qpt/eval.hpp"
#include "qpt/gbdt.hpp"
#include "qpt/preprocess.hpp"
#include "qpt/rng.hpp"
#include "qpt/schema.hpp"
#include "qpt/synthgen.hpp"
#include "support/naive_pipeline.hpp"
#include "support/random_jobs.hpp"
#include "support/tree_oracle.hpp"

namespace {

using namespace qpt;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] AC-%02d [PRIMARY] %s: %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int worker_threads() {
  return static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 8u));
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

const GroupReport* group(const EvaluationReport& r, Primitive p) {
  for (const auto& g : r.groups) {
    if (g.primitive_id == p) return &g;
  }
  return nullptr;
}

struct TrainedRun {
  cli::TrainOutcome outcome;
  EvaluationReport report;
  double seconds = 0.0;
};

TrainedRun train_and_evaluate(const cli::RunConfig& config, std::size_t n) {
  const auto t0 = Clock::now();
  const auto jobs = generate(config.generator, n);
  TrainedRun run{cli::train(config, jobs, std::nullopt, worker_threads(), true), {}, 0.0};
  const auto test = select(std::span<const QuantumJob>(jobs), std::span<const std::size_t>(run.outcome.split.test_indices));
  const auto records = cli::evaluation_records(run.outcome.model, test, config.heuristic, worker_threads());
  run.report = build_report(records, config.eval);
  run.seconds = seconds_since(t0);
  return run;
}

void ac01_first_tree_oracle() {
  const auto t0 = Clock::now();
  Rng rng(2001);
  const int cases = 250;
  int matched = 0;
  std::string first_failure;
  for (int i = 0; i < cases; ++i) {
    const auto c = testing::random_oracle_case(rng);
    std::string why;
    if (testing::first_tree_matches_oracle(c, &why)) {
      ++matched;
    } else if (first_failure.empty()) {
      first_failure = " first mismatch in case " + std::to_string(i) + ": " + why;
    }
  }
  const double s = seconds_since(t0);
  report(1, matched == cases && s < 10.0, "first tree matches exhaustive-split oracle",
         std::to_string(matched) + "/" + std::to_string(cases) + " cases in " + fmt("%.2f", s) +
             " s (limit 10 s)" + first_failure);
}

void ac02_weight_duplication() {
  Rng rng(2002);
  const int cases = 60;
  int equal = 0;
  for (int i = 0; i < cases; ++i) {
    const auto rows = static_cast<std::size_t>(rng.uniform_int(2, 40));
    const auto cols = static_cast<std::size_t>(rng.uniform_int(1, 3));
    FeatureMatrix x;
    x.rows = rows;
    for (std::size_t c = 0; c < cols; ++c) x.columns.push_back("f" + std::to_string(c));
    std::vector<double> y(rows);
    std::vector<double> w(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        x.values.push_back(rng.bernoulli(0.5) ? static_cast<double>(rng.uniform_int(0, 5)) : rng.uniform(-3.0, 3.0));
      }
      y[r] = rng.bernoulli(0.5) ? static_cast<double>(rng.uniform_int(-20, 20)) : rng.normal() * 10.0;
      w[r] = static_cast<double>(rng.uniform_int(1, 5));
    }
    FeatureMatrix xd;
    xd.columns = x.columns;
    std::vector<double> yd;
    for (std::size_t r = 0; r < rows; ++r) {
      for (int k = 0; k < static_cast<int>(w[r]); ++k) {
        const auto row = x.row(r);
        xd.values.insert(xd.values.end(), row.begin(), row.end());
        yd.push_back(y[r]);
        ++xd.rows;
      }
    }
    Hyperparams hp;
    hp.n_estimators = static_cast<int>(rng.uniform_int(1, 30));
    hp.num_leaves = static_cast<int>(rng.uniform_int(2, 12));
    hp.learning_rate = rng.bernoulli(0.5) ? 0.1 : rng.uniform(0.05, 1.0);
    hp.min_child_weight = rng.bernoulli(0.5) ? 1e-3 : static_cast<double>(rng.uniform_int(1, 6));
    if (rng.bernoulli(0.3)) {
      hp.objective = Objective::quantile;
      hp.alpha = rng.uniform(0.1, 0.9);
    }
    const auto weighted = fit(x, y, w, hp);
    const auto duplicated = fit(xd, yd, std::vector<double>(xd.rows, 1.0), hp);
    FeatureMatrix probe = x;
    for (int k = 0; k < 50; ++k) {
      for (std::size_t c = 0; c < cols; ++c) probe.values.push_back(rng.uniform(-4.0, 6.0));
      ++probe.rows;
    }
    if (bits_equal(predict(weighted, probe), predict(duplicated, probe))) ++equal;
  }
  report(2, equal == cases, "integer weights equal duplicated rows, bit-exact",
         std::to_string(equal) + "/" + std::to_string(cases) + " datasets with weights 1..5");
}

void ac03_loss_monotone(const TrainedRun& run) {
  const auto& loss = run.outcome.model.gbdt.training_loss;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < loss.size(); ++i) worst = std::max(worst, loss[i] - loss[i - 1]);
  const std::size_t rounds = loss.empty() ? 0 : loss.size() - 1;
  report(3, rounds == 200 && worst <= 1e-12, "weighted l2 training loss non-increasing per round",
         std::to_string(rounds) + " rounds, largest increase " + fmt("%.3g", worst) + " (tolerance 1e-12), loss " +
             fmt("%.6g", loss.front()) + " -> " + fmt("%.6g", loss.back()));
}

void ac04_noiseless() {
  cli::RunConfig config;
  config.generator.noise_sigma = 0.0;
  config.model.n_estimators = 1000;
  const auto run = train_and_evaluate(config, 20000);
  const auto* s = group(run.report, Primitive::sampler);
  const auto* e = group(run.report, Primitive::estimator);
  const double sv = s ? s->ml_buckets[0] : 0.0;
  const double ev = e ? e->ml_buckets[0] : 0.0;
  report(4, sv >= 0.99 && ev >= 0.99 && run.seconds < 60.0, "noiseless data is learned to within 20%",
         "sampler " + fmt("%.4f", sv) + ", estimator " + fmt("%.4f", ev) + " (need >= 0.99) in " +
             fmt("%.1f", run.seconds) + " s (limit 60 s)");
}

void ac05_gap(const TrainedRun& run) {
  std::string detail;
  bool pass = run.seconds < 120.0;
  for (const Primitive p : {Primitive::sampler, Primitive::estimator}) {
    const auto* g = group(run.report, p);
    if (g == nullptr) {
      pass = false;
      detail += std::string(to_string(p)) + " missing; ";
      continue;
    }
    const double gap = 100.0 * (g->ml_buckets[0] - g->heuristic_buckets[0]);
    pass = pass && gap >= 20.0;
    detail += std::string(to_string(p)) + " ml " + fmt("%.3f", g->ml_buckets[0]) + " heuristic " +
              fmt("%.3f", g->heuristic_buckets[0]) + " gap " + fmt("%.1f", gap) + " pp; ";
  }
  report(5, pass, "ML beats calibrated heuristic by >= 20 pp within 20%",
         detail + "chain " + fmt("%.1f", run.seconds) + " s (limit 120 s)");
}

void ac06_buckets() {
  bool pass = true;
  const std::vector<double> t{20, 40, 60};
  const std::vector<EvaluationRecord> hand{{"a", 100, 110, 100, Primitive::sampler},
                                           {"b", 100, 150, 120, Primitive::sampler}};
  pass = pass && accuracy_buckets(hand, Method::ml, t) == std::vector<double>{0.5, 0.5, 1.0};
  pass = pass && accuracy_buckets(hand, Method::heuristic, t) == std::vector<double>{1.0, 1.0, 1.0};
  std::vector<EvaluationRecord> perfect = hand;
  for (auto& r : perfect) r.ml_predicted_seconds = r.actual_seconds;
  pass = pass && accuracy_buckets(perfect, Method::ml, t) == std::vector<double>(3, 1.0);

  Rng rng(2006);
  std::size_t checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 200));
    std::vector<EvaluationRecord> recs;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = static_cast<double>(rng.uniform_int(1, 50)) * 10.0;
      const double pe = static_cast<double>(rng.uniform_int(0, 12)) * 10.0;
      const double p = rng.bernoulli(0.5) ? a * (1.0 + pe / 100.0) : a * std::max(0.0, 1.0 - pe / 100.0);
      recs.push_back({"r", a, p, rng.uniform(0.0, 1000.0), Primitive::sampler});
    }
    std::vector<double> th{0, 10, 20, 30, 40, 50, 60, 80, 100, 1e300};
    for (const Method m : {Method::ml, Method::heuristic}) {
      const auto b = accuracy_buckets(recs, m, th);
      for (std::size_t k = 0; k < th.size(); ++k) {
        std::size_t in = 0;
        for (const auto& r : recs) in += percent_error(r.predicted(m), r.actual_seconds) <= th[k] ? 1 : 0;
        pass = pass && b[k] == static_cast<double>(in) / static_cast<double>(n);
        if (k > 0) pass = pass && b[k] >= b[k - 1];
        ++checked;
      }
      pass = pass && b.back() == 1.0;
    }
  }
  report(6, pass, "buckets monotone with inclusive boundary",
         "hand cases plus " + std::to_string(checked) + " randomized bucket checks");
}

void ac07_sweep(const TrainedRun& run) {
  bool pass = true;
  const std::vector<EvaluationRecord> halves{{"a", 200, 100, 100, Primitive::sampler},
                                             {"b", 6, 3, 3, Primitive::estimator}};
  const std::vector<double> f{2.0, 2.01};
  const auto hand = safety_factor_sweep(halves, Method::ml, f);
  pass = pass && hand[0].percent_overestimated == 0.0 && hand[1].percent_overestimated == 100.0;
  const std::vector<EvaluationRecord> exact{{"a", 7, 7, 7, Primitive::sampler}};
  const std::vector<double> one{1.0};
  pass = pass && safety_factor_sweep(exact, Method::ml, one)[0].percent_overestimated == 0.0;

  std::string detail;
  for (const auto& g : run.report.groups) {
    for (const auto* sweep : {&g.ml_sweep, &g.heuristic_sweep}) {
      for (std::size_t k = 1; k < sweep->size(); ++k) {
        pass = pass && (*sweep)[k].percent_overestimated >= (*sweep)[k - 1].percent_overestimated;
      }
    }
    double reached = std::numeric_limits<double>::infinity();
    for (const auto& p : g.ml_sweep) {
      if (p.percent_overestimated >= 99.0) {
        reached = p.factor;
        break;
      }
    }
    pass = pass && reached <= 3.0;
    detail += std::string(to_string(g.primitive_id)) + " ML reaches 99% at factor " + fmt("%.1f", reached) +
              " (heuristic " +
              (g.heuristic_safety_factor ? fmt("%.1f", *g.heuristic_safety_factor) : std::string("never")) + "); ";
  }
  pass = pass && run.report.groups.size() == 2;
  report(7, pass, "safety sweep monotone and ML covers 99% by factor 3.0", detail + "factor-2 hand cases exact");
}

void ac08_percent_error() {
  bool pass = percent_error(120.0, 100.0) == 20.0 && percent_error(80.0, 100.0) == 20.0;
  try {
    percent_error(100.0, 0.0);
    pass = false;
  } catch (const DataError&) {
  }
  Rng rng(2008);
  double worst = 0.0;
  bool within = true;
  for (int i = 0; i < 1000; ++i) {
    const double a = std::exp(rng.uniform(-6.0, 9.0));
    const double p = std::exp(rng.uniform(-6.0, 9.0));
    const double k = std::exp(rng.uniform(-12.0, 12.0));
    const double d = std::abs(percent_error(k * p, k * a) - percent_error(p, a));
    const double tol = 100.0 * 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + p / a);
    worst = std::max(worst, d / tol);
    within = within && d <= tol;
  }
  report(8, pass && within, "percent error hand cases and scale invariance",
         "3 hand cases exact, 1000 (p, a, k) triples, worst deviation " + fmt("%.3f", worst) +
             " of the rounding bound 800 eps (1 + p/a)");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool run_chain(const std::filesystem::path& dir, int threads) {
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string cli = QPT_CLI_PATH;
  const std::string t = std::to_string(threads);
  const std::string d = dir.string();
  const std::string quiet = " > " + d + "/log.txt 2>&1";
  const std::vector<std::string> steps{
      cli + " generate --n 20000 --seed 42 --out " + d + "/jobs.jsonl" + quiet,
      cli + " train --data " + d + "/jobs.jsonl --threads " + t + " --reproducible --out " + d + "/model.json" + quiet,
      cli + " evaluate --data " + d + "/jobs.jsonl --model " + d + "/model.json --threads " + t +
          " --reproducible --out " + d + "/report" + quiet};
  for (const auto& s : steps) {
    if (std::system(s.c_str()) != 0) return false;
  }
  return true;
}

void ac09_determinism() {
  const auto root = std::filesystem::temp_directory_path() / "qpt_acceptance_determinism";
  const std::vector<std::pair<std::string, int>> runs{{"a", 8}, {"b", 8}, {"c", 1}};
  bool ran = true;
  for (const auto& [name, threads] : runs) ran = ran && run_chain(root / name, threads);
  const std::vector<std::string> files{"jobs.jsonl", "model.json", "report/report.json", "report/curves.csv",
                                       "report/sweep.csv"};
  bool same = ran;
  std::string differing;
  for (const auto& f : files) {
    const auto ref = slurp(root / "a" / f);
    for (const char* other : {"b", "c"}) {
      if (ref.empty() || slurp(root / other / f) != ref) {
        same = false;
        differing += " " + std::string(other) + "/" + f;
      }
    }
  }
  if (same) std::filesystem::remove_all(root);
  report(9, same, "generate, train, evaluate are byte-identical across runs and thread counts",
         ran ? (same ? "5 files identical over 2 runs at 8 threads and 1 run at 1 thread"
                     : "differs:" + differing)
             : "a CLI step failed; see " + root.string());
}

void ac10_preprocess_oracle() {
  bool exact = true;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    testing::RandomJobOptions o;
    o.coarse = seed % 3 == 0;
    o.missing_probability = seed % 2 == 0 ? 0.2 : 0.05;
    Rng sizes(seed);
    const auto train = testing::random_jobs(10000 + seed, static_cast<std::size_t>(sizes.uniform_int(5, 120)), o);
    const auto apply = testing::random_jobs(20000 + seed, static_cast<std::size_t>(sizes.uniform_int(1, 60)), o);
    const auto specs = default_feature_specs();
    const auto p = fit_pipeline(specs, train);
    for (const auto* set : {&train, &apply}) {
      const auto got = transform(p, *set);
      const auto want = testing::naive_fit_transform(specs, train, *set);
      exact = exact && got.columns == want.columns && bits_equal(got.values, want.values);
    }
    const auto x = transform(p, train);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (p.is_constant(c)) continue;
      double mean = 0.0;
      for (std::size_t r = 0; r < x.rows; ++r) mean += x.at(r, c);
      mean /= static_cast<double>(x.rows);
      double var = 0.0;
      for (std::size_t r = 0; r < x.rows; ++r) var += (x.at(r, c) - mean) * (x.at(r, c) - mean);
      const double sd = std::sqrt(var / static_cast<double>(x.rows));
      worst = std::max({worst, std::abs(mean), std::abs(sd - 1.0)});
    }
  }
  report(10, exact && worst <= 1e-9, "pipeline matches naive per-column reference",
         std::string(exact ? "100 datasets bit-exact" : "bit mismatch") + ", largest |mean| or |std - 1| " +
             fmt("%.3g", worst) + " (tolerance 1e-9)");
}

void ac11_split() {
  bool pass = true;
  std::string detail;
  for (int variant = 0; variant < 2; ++variant) {
    Rng rng(2011 + static_cast<std::uint64_t>(variant));
    testing::RandomJobOptions o;
    auto jobs = testing::random_jobs(2011, 1000, o);
    const Timestamp start = o.start;
    std::vector<std::int64_t> offsets(1000);
    if (variant == 0) {
      for (std::size_t i = 0; i < offsets.size(); ++i) offsets[i] = static_cast<std::int64_t>(i) * 1382;
    } else {
      std::vector<std::int64_t> pool;
      while (pool.size() < 1000) {
        pool.push_back(rng.uniform_int(0, o.span_seconds));
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
      }
      offsets.swap(pool);
    }
    for (std::size_t i = offsets.size(); i > 1; --i) {
      std::swap(offsets[i - 1], offsets[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) jobs[i].completed_at = Timestamp{start.seconds + offsets[i]};
    const Timestamp cutoff = cutoff_for_fraction(jobs, 0.94);
    const auto split = split_by_cutoff(jobs, cutoff);
    std::vector<Timestamp> sorted;
    for (const auto& j : jobs) sorted.push_back(j.completed_at);
    std::sort(sorted.begin(), sorted.end());
    bool boundary_train = false;
    for (const auto i : split.train_indices) boundary_train = boundary_train || jobs[i].completed_at == cutoff;
    pass = pass && split.train_indices.size() == 940 && split.test_indices.size() == 60 && boundary_train &&
           cutoff == sorted[939];
    detail += std::string(variant == 0 ? "evenly spaced" : "uniform random") + " dates " +
              std::to_string(split.train_indices.size()) + "/" + std::to_string(split.test_indices.size()) +
              (boundary_train ? " boundary on train side" : " boundary missing") + (variant == 0 ? "; " : "");
  }
  report(11, pass, "train_fraction 0.94 splits 1000 jobs 940/60", detail);
}

}  // namespace

int main() {
  try {
    ac01_first_tree_oracle();
    ac02_weight_duplication();
    const TrainedRun defaults = train_and_evaluate(cli::RunConfig{}, 50000);
    ac03_loss_monotone(defaults);
    ac04_noiseless();
    ac05_gap(defaults);
    ac06_buckets();
    ac07_sweep(defaults);
    ac08_percent_error();
    ac09_determinism();
    ac10_preprocess_oracle();
    ac11_split();
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
