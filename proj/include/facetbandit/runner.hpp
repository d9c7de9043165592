/*
 * Copyright 2026 The facetbandit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// Run orchestration with file output.
//
// A run directory holds
//   config.json                    resolved configuration
//   summary.csv / summary.json     one row per replica
//   replica_NNN/steps.jsonl        one StepRecord per line
//   replica_NNN/timeline.csv       <= 500 rows: policy, play fractions, regret
//
// Replicas run concurrently; each one owns its files, so output bytes do not
// depend on scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "facetbandit/errors.hpp"
#include "facetbandit/experiment.hpp"
#include "facetbandit/format.hpp"

namespace facetbandit {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* kOutputRootEnv = "FACETBANDIT_OUTPUT_ROOT";

/// A relative output directory is placed under $FACETBANDIT_OUTPUT_ROOT when set.
inline fs::path resolve_output_dir(const std::string& dir) {
  fs::path p(dir);
  if (p.is_relative()) {
    if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') return fs::path(root) / p;
  }
  return p;
}

inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["scheduler"] = scheduler_name(c.scheduler);
  j["preset"] = c.preset;
  j["reward"] = c.reward.name();
  j["steps"] = c.steps;
  j["batch_size"] = c.batch_size;
  j["eval_batch_size"] = c.eval_batch_size;
  j["eval_every"] = c.eval_every;
  j["replicas"] = c.replicas;
  j["seed"] = c.seed;
  j["exploration_rate"] = c.exploration_rate;
  j["learning_rate"] = c.learning_rate;
  j["weight_cap"] = c.weight_cap;
  j["task"] = c.task;
  j["data_dir"] = c.data_dir;
  j["learner"] = c.learner == TaskKind::Regression ? "regression" : "classification";
  j["classes"] = c.classes;
  j["step_size"] = c.step_size ? json(*c.step_size) : json(nullptr);
  j["arm_means"] = c.arm_means;
  j["arm_dist"] = c.arm_dist == PayoffKind::Bernoulli ? "bernoulli" : "gaussian";
  j["arm_sigma"] = c.arm_sigma;
  j["rescale"] = c.rescale;
  return j;
}

inline json record_to_json(const StepRecord& r, bool testbed) {
  json j;
  j["t"] = r.t;
  j["arm"] = r.arm ? json(*r.arm) : json(nullptr);
  j["probs"] = r.probs;
  j["raw_reward"] = r.raw_reward ? json(*r.raw_reward) : json(nullptr);
  j["scaled_reward"] = r.scaled_reward ? json(*r.scaled_reward) : json(nullptr);
  if (!testbed) {
    j["loss_before"] = r.loss_before;
    j["loss_after"] = r.loss_after;
    j["dev_loss"] = r.dev_loss ? json(*r.dev_loss) : json(nullptr);
  }
  if (!r.batch_facets.empty()) j["batch_facets"] = r.batch_facets;
  return j;
}

namespace detail {

inline std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeAbort("cannot write " + p.string());
  return out;
}

inline void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw RuntimeAbort("cannot create output directory " + p.string());
}

inline std::string num(double v) { return std::isfinite(v) ? format_double(v) : (std::isnan(v) ? "" : (v > 0 ? "inf" : "-inf")); }

inline std::string csv_safe(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
  return s;
}

/// Accumulates the per-replica timeline: policy snapshot and play fractions per
/// bucket between downsample marks.
class TimelineWriter {
 public:
  TimelineWriter(std::size_t steps, std::size_t n_arms) : marks_(downsample_marks(steps)), bucket_(n_arms, 0.0) {}

  void observe(const StepRecord& r, double regret) {
    if (r.arm) {
      bucket_[*r.arm] += 1.0;
    } else {
      for (std::size_t a = 0; a < bucket_.size(); ++a) bucket_[a] += static_cast<double>(r.batch_facets[a]);
    }
    if (next_ < marks_.size() && r.t + 1 == marks_[next_]) {
      double total = 0.0;
      for (double c : bucket_) total += c;
      std::ostringstream row;
      row << marks_[next_];
      for (double p : r.probs) row << ',' << num(p);
      for (double c : bucket_) row << ',' << num(total > 0 ? c / total : 0.0);
      row << ',' << num(regret);
      rows_.push_back(row.str());
      std::fill(bucket_.begin(), bucket_.end(), 0.0);
      ++next_;
    }
  }

  void write(const fs::path& p) const {
    auto out = open_out(p);
    out << "steps";
    for (std::size_t a = 0; a < bucket_.size(); ++a) out << ",prob_" << a;
    for (std::size_t a = 0; a < bucket_.size(); ++a) out << ",played_" << a;
    out << ",regret\n";
    for (const auto& r : rows_) out << r << '\n';
  }

 private:
  std::vector<std::size_t> marks_;
  std::vector<double> bucket_;
  std::vector<std::string> rows_;
  std::size_t next_ = 0;
};

inline std::size_t arm_count(const ExperimentConfig& cfg, bool testbed, const FacetedDataset* loaded) {
  if (testbed) return cfg.arm_means.size();
  if (loaded != nullptr) return loaded->n_facets();
  return cfg.task == "separable" ? SurrogateTaskSpec::separable().facets.size()
                                 : SurrogateTaskSpec::skewed_default().facets.size();
}

}  // namespace detail

struct RunSummary {
  ExperimentConfig config;
  bool testbed = false;
  std::vector<ReplicaResult> replicas;

  bool any_aborted() const {
    return std::any_of(replicas.begin(), replicas.end(), [](const auto& r) { return r.aborted; });
  }
};

inline json replica_to_json(const ReplicaResult& r) {
  auto opt = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["replica"] = r.replica;
  j["seed"] = r.seed;
  j["status"] = r.aborted ? "aborted" : "ok";
  j["error"] = r.error;
  j["records"] = r.records;
  j["play_counts"] = r.play_counts;
  j["play_fractions"] = r.play_fractions();
  j["final_dev_loss"] = opt(r.final_dev_loss);
  j["best_dev_loss"] = opt(r.best_dev_loss);
  j["best_step"] = r.best_step;
  j["regret"] = opt(r.regret);
  return j;
}

inline void write_summary(const RunSummary& s, const fs::path& dir) {
  const std::size_t n = s.replicas.empty() ? 0 : s.replicas.front().play_counts.size();
  auto out = detail::open_out(dir / "summary.csv");
  out << "replica,seed,status,steps";
  for (std::size_t a = 0; a < n; ++a) out << ",plays_" << a;
  for (std::size_t a = 0; a < n; ++a) out << ",fraction_" << a;
  out << ",final_dev_loss,best_dev_loss,best_step,regret,error\n";
  json js = json::array();
  for (const auto& r : s.replicas) {
    out << r.replica << ',' << r.seed << ',' << (r.aborted ? "aborted" : "ok") << ',' << r.records;
    for (auto c : r.play_counts) out << ',' << c;
    for (double f : r.play_fractions()) out << ',' << detail::num(f);
    out << ',' << detail::num(r.final_dev_loss) << ',' << detail::num(r.best_dev_loss) << ',' << r.best_step << ','
        << detail::num(r.regret) << ',' << detail::csv_safe(r.error) << '\n';
    js.push_back(replica_to_json(r));
  }
  auto jout = detail::open_out(dir / "summary.json");
  jout << json{{"testbed", s.testbed}, {"config", config_to_json(s.config)}, {"replicas", js}}.dump(2) << '\n';
}

/// Executes every replica of `cfg`, writing logs under `dir`. With
/// `testbed` the stochastic bandit replaces the learner. Returns the summary;
/// aborted replicas are marked rather than thrown.
inline RunSummary run_to_directory(const ExperimentConfig& cfg, const fs::path& dir, bool testbed,
                                   const FacetedDataset* loaded = nullptr) {
  cfg.validate();
  detail::ensure_dir(dir);
  {
    auto out = detail::open_out(dir / "config.json");
    out << json{{"testbed", testbed}, {"config", config_to_json(cfg)}}.dump(2) << '\n';
  }
  const std::size_t n_arms = detail::arm_count(cfg, testbed, loaded);

  RunSummary summary{cfg, testbed, std::vector<ReplicaResult>(cfg.replicas)};
  std::vector<std::string> failures(cfg.replicas);

  auto work = [&](std::size_t i) {
    try {
      char name[32];
      std::snprintf(name, sizeof(name), "replica_%03zu", i);
      const fs::path rdir = dir / name;
      detail::ensure_dir(rdir);
      std::ofstream steps;
      if (cfg.log_steps) steps = detail::open_out(rdir / "steps.jsonl");
      detail::TimelineWriter timeline(cfg.steps, n_arms);
      double regret = NAN;
      std::vector<double> means;
      double best = 0.0;
      if (testbed) {
        means = cfg.arm_means;
        best = *std::max_element(means.begin(), means.end());
        regret = 0.0;
      }
      auto sink = [&](const StepRecord& r) {
        if (testbed) regret += best - means[*r.arm];
        timeline.observe(r, regret);
        if (cfg.log_steps) steps << record_to_json(r, testbed).dump() << '\n';
      };
      summary.replicas[i] = testbed ? run_regret_replica(cfg, i, sink) : run_replica(cfg, i, sink, loaded);
      if (cfg.log_steps && !steps) throw RuntimeAbort("write failed for " + (rdir / "steps.jsonl").string());
      timeline.write(rdir / "timeline.csv");
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  };

  std::size_t threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, cfg.replicas);
  if (threads <= 1) {
    for (std::size_t i = 0; i < cfg.replicas; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cfg.replicas; i = next++) work(i);
      });
  }
  for (const auto& f : failures)
    if (!f.empty()) throw RuntimeAbort(f);

  write_summary(summary, dir);
  return summary;
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepCell {
  double mu = 0.0;
  double gamma = 0.0;
  bool failed = false;
  std::string error;
  double metric = std::numeric_limits<double>::infinity();  // mean best dev loss, or mean regret
  double metric_std = 0.0;
  double final_dev_loss = NAN;
  std::size_t steps = 0;
  std::string directory;
};

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? NAN : s / static_cast<double>(v.size());
}

/// Sample standard deviation; 0 for fewer than two values.
inline double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Runs every (mu, gamma) cell, truncated to `base.horizon` steps, and ranks
/// cells by mean best dev loss (testbed: mean regret), ascending. The sort is
/// stable, so ties keep grid order (mu-major). Failed cells go last.
inline std::vector<SweepCell> sweep(const ExperimentConfig& base, const fs::path& dir, bool testbed,
                                    const FacetedDataset* loaded = nullptr) {
  if (base.mu_grid.empty() || base.gamma_grid.empty()) throw ConfigError("sweep grid is empty");
  base.validate();
  detail::ensure_dir(dir);
  std::vector<SweepCell> cells;
  for (double mu : base.mu_grid) {
    for (double gamma : base.gamma_grid) {
      SweepCell cell;
      cell.mu = mu;
      cell.gamma = gamma;
      ExperimentConfig cfg = base;
      cfg.learning_rate = mu;
      cfg.exploration_rate = gamma;
      cfg.scheduler = SchedulerKind::Exp3;
      cfg.steps = std::min(base.steps, base.horizon);
      cell.steps = cfg.steps;
      const std::string name = "mu_" + format_double(mu) + "_gamma_" + format_double(gamma);
      cell.directory = name;
      try {
        const RunSummary s = run_to_directory(cfg, dir / name, testbed, loaded);
        std::vector<double> metric, final_loss;
        for (const auto& r : s.replicas) {
          if (r.aborted) throw RuntimeAbort(r.error);
          metric.push_back(testbed ? r.regret : r.best_dev_loss);
          final_loss.push_back(r.final_dev_loss);
        }
        cell.metric = mean_of(metric);
        cell.metric_std = stddev_of(metric);
        cell.final_dev_loss = mean_of(final_loss);
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
        cell.metric = std::numeric_limits<double>::infinity();
      }
      cells.push_back(std::move(cell));
    }
  }
  std::stable_sort(cells.begin(), cells.end(), [](const SweepCell& a, const SweepCell& b) {
    if (a.failed != b.failed) return !a.failed;
    return a.metric < b.metric;
  });

  auto out = detail::open_out(dir / "sweep.csv");
  out << "rank,mu,gamma,status," << (testbed ? "regret" : "best_dev_loss") << ",std,final_dev_loss,steps,directory,error\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    out << i + 1 << ',' << detail::num(c.mu) << ',' << detail::num(c.gamma) << ',' << (c.failed ? "failed" : "ok") << ','
        << (c.failed ? "" : detail::num(c.metric)) << ',' << detail::num(c.metric_std) << ','
        << detail::num(c.final_dev_loss) << ',' << c.steps << ',' << c.directory << ',' << detail::csv_safe(c.error)
        << '\n';
  }
  return cells;
}

}  // namespace facetbandit
