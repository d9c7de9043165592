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

// Experiment configuration and single-replica execution. File output lives
// in runner.hpp; everything here works in memory.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "facetbandit/bandit_core.hpp"
#include "facetbandit/bandit_env.hpp"
#include "facetbandit/curriculum.hpp"
#include "facetbandit/dataset.hpp"
#include "facetbandit/errors.hpp"
#include "facetbandit/learner.hpp"
#include "facetbandit/random.hpp"
#include "facetbandit/rewards.hpp"
#include "facetbandit/samplers.hpp"
#include "facetbandit/surrogate.hpp"

namespace facetbandit {

enum class SchedulerKind { Exp3, Static, Mixed };

inline SchedulerKind parse_scheduler(std::string_view s) {
  if (s == "exp3") return SchedulerKind::Exp3;
  if (s == "static") return SchedulerKind::Static;
  if (s == "mixed") return SchedulerKind::Mixed;
  throw ConfigError("unknown scheduler '" + std::string(s) + "' (expected exp3, static or mixed)");
}

inline std::string scheduler_name(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::Exp3: return "exp3";
    case SchedulerKind::Static: return "static";
    case SchedulerKind::Mixed: return "mixed";
  }
  return "?";
}

inline TaskKind parse_task_kind(std::string_view s) {
  if (s == "regression") return TaskKind::Regression;
  if (s == "classification") return TaskKind::Classification;
  throw ConfigError("unknown learner '" + std::string(s) + "' (expected regression or classification)");
}

struct ExperimentConfig {
  SchedulerKind scheduler = SchedulerKind::Exp3;
  std::string preset = "proportional";  // temperature for static / mixed
  RewardKind reward{ProgressMeasure::Pg, EvalSource::DevBatch};
  std::size_t steps = 1000;
  std::size_t batch_size = 16;
  std::size_t eval_batch_size = 64;
  std::size_t eval_every = 100;
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::string output_dir = "runs";

  // EXP3
  double exploration_rate = 0.25;
  double learning_rate = 0.1;
  double weight_cap = 50.0;

  // Learner world: a named synthetic task or a facet directory.
  std::string task = "skewed";  // skewed | separable
  std::string data_dir;
  TaskKind learner = TaskKind::Regression;
  std::size_t classes = 3;
  std::optional<double> step_size;  // overrides the task default

  // Bandit testbed (regret subcommand).
  std::vector<double> arm_means{0.7, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  PayoffKind arm_dist = PayoffKind::Bernoulli;
  double arm_sigma = 1.0;
  bool rescale = false;  // pass testbed payoffs through the reward window
  bool log_steps = true;

  // Sweep.
  std::vector<double> mu_grid{0.001, 0.01, 0.1};
  std::vector<double> gamma_grid{0.1, 0.2, 0.25, 0.3, 0.4, 0.5};
  std::size_t horizon = 50000;

  Exp3Config exp3(std::size_t n_arms) const { return {n_arms, exploration_rate, learning_rate, weight_cap}; }

  void validate() const {
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (replicas < 1) throw ConfigError("replicas must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (eval_batch_size < 1) throw ConfigError("eval_batch_size must be >= 1");
    if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
    if (scheduler != SchedulerKind::Exp3) (void)Temperature::parse(preset);
    exp3(1).validate();
    if (step_size && !(*step_size >= 0.0)) throw ConfigError("step_size must be nonnegative");
    if (data_dir.empty() && task != "skewed" && task != "separable")
      throw ConfigError("unknown task '" + task + "' (expected skewed or separable, or set data_dir)");
  }
};

/// Per-replica outcome.
struct ReplicaResult {
  std::size_t replica = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> play_counts;  // arms played, or examples per facet for mixed batches
  std::vector<std::pair<std::size_t, double>> dev_curve;  // (steps trained, full dev loss)
  double final_dev_loss = NAN;
  double best_dev_loss = NAN;
  std::size_t best_step = 0;  // steps trained at the best dev loss
  double regret = NAN;        // testbed runs only
  std::vector<std::pair<std::size_t, double>> regret_curve;
  bool aborted = false;
  std::string error;
  std::size_t records = 0;

  std::vector<double> play_fractions() const {
    double total = 0.0;
    for (auto c : play_counts) total += static_cast<double>(c);
    std::vector<double> out;
    for (auto c : play_counts) out.push_back(total > 0 ? static_cast<double>(c) / total : 0.0);
    return out;
  }

  /// First number of steps at which the dev loss is <= target, if any.
  std::optional<std::size_t> steps_to_reach(double target) const {
    for (const auto& [s, l] : dev_curve)
      if (l <= target) return s;
    return std::nullopt;
  }
};

using StepSink = std::function<void(const StepRecord&)>;

inline std::uint64_t replica_seed(std::uint64_t master, std::size_t replica) { return child_seed(master, replica); }

/// Steps after which a downsampled series keeps a point: ceil(k * total / points)
/// for k = 1..points, points = min(total, max_points). Always ends at `total`.
inline std::vector<std::size_t> downsample_marks(std::size_t total, std::size_t max_points = 500) {
  const std::size_t points = std::min(total, max_points);
  std::vector<std::size_t> marks;
  marks.reserve(points);
  for (std::size_t k = 1; k <= points; ++k) marks.push_back((k * total + points - 1) / points);
  return marks;
}

struct World {
  FacetedDataset data;
  std::unique_ptr<Learner> learner;
};

/// Builds the dataset and a fresh learner for one replica. A loaded dataset is
/// shared (copied) across replicas; synthetic tasks are generated per replica seed.
inline World make_world(const ExperimentConfig& cfg, std::uint64_t rseed, const FacetedDataset* loaded) {
  World w;
  if (loaded != nullptr) {
    w.data = *loaded;
    const double step = cfg.step_size.value_or(0.02);
    w.learner = make_learner(cfg.learner, w.data.input_dim(), cfg.classes, step, 0.0, child_seed(rseed, Stream::Init));
    return w;
  }
  SurrogateTaskSpec spec = cfg.task == "separable" ? SurrogateTaskSpec::separable() : SurrogateTaskSpec::skewed_default();
  spec.kind = cfg.learner;
  spec.classes = cfg.classes;
  if (cfg.step_size) spec.step_size = *cfg.step_size;
  w.data = make_surrogate_task(spec, child_seed(rseed, Stream::Task)).data;
  w.learner = make_surrogate_learner(spec, child_seed(rseed, Stream::Init));
  return w;
}

/// Runs one replica of a learner experiment (exp3, static or mixed),
/// handing every StepRecord to `sink`. Learner divergence is reported through
/// `aborted`/`error` rather than thrown.
inline ReplicaResult run_replica(const ExperimentConfig& cfg, std::size_t replica, const StepSink& sink,
                                 const FacetedDataset* loaded = nullptr) {
  cfg.validate();
  ReplicaResult res;
  res.replica = replica;
  res.seed = replica_seed(cfg.seed, replica);
  World world = make_world(cfg, res.seed, loaded);
  world.data.validate();
  const FacetedDataset& data = world.data;
  Learner& learner = *world.learner;
  const std::size_t n = data.n_facets();
  res.play_counts.assign(n, 0);

  StepStreams streams(res.seed);
  const StepOptions opt{cfg.batch_size, cfg.eval_batch_size};
  const Exp3Config bandit = cfg.exp3(n);
  Exp3State state = init_state(bandit);
  RewardWindow window;
  std::optional<StaticSchedule> schedule;
  Distribution fixed;
  if (cfg.scheduler != SchedulerKind::Exp3) {
    fixed = temperature_distribution(FacetCounts{data.counts()}, Temperature::parse(cfg.preset));
    schedule.emplace(fixed);
  }
  const Batch full_dev = all_of(data.dev);

  try {
    for (std::size_t t = 0; t < cfg.steps; ++t) {
      StepRecord rec;
      switch (cfg.scheduler) {
        case SchedulerKind::Exp3:
          rec = run_curriculum_step(state, bandit, learner, data, cfg.reward, window, streams, opt);
          break;
        case SchedulerKind::Static:
          rec = run_static_step(t, *schedule, learner, data, streams, opt);
          break;
        case SchedulerKind::Mixed:
          rec = run_mixed_step(t, fixed, learner, data, streams, opt);
          break;
      }
      if (rec.arm) {
        ++res.play_counts[*rec.arm];
      } else {
        for (std::size_t f = 0; f < n; ++f) res.play_counts[f] += rec.batch_facets[f];
      }
      if ((t + 1) % cfg.eval_every == 0 || t + 1 == cfg.steps) {
        const double dev = learner.eval(full_dev);
        if (!std::isfinite(dev)) throw RuntimeAbort("non-finite dev loss at step " + std::to_string(t));
        rec.dev_loss = dev;
        res.dev_curve.emplace_back(t + 1, dev);
        if (!(dev >= res.best_dev_loss)) {  // also true while best is NaN
          res.best_dev_loss = dev;
          res.best_step = t + 1;
        }
        res.final_dev_loss = dev;
      }
      if (sink) sink(rec);
      ++res.records;
    }
  } catch (const RuntimeAbort& e) {
    res.aborted = true;
    res.error = e.what();
  }
  return res;
}

/// Runs EXP3 against a stochastic testbed and tracks pseudo-regret.
/// Payoffs are used as rewards directly (clamped to [-1, 1]) unless
/// `cfg.rescale` routes them through the quantile window.
inline ReplicaResult run_regret_replica(const ExperimentConfig& cfg, std::size_t replica, const StepSink& sink) {
  cfg.validate();
  const StochasticBanditEnv env(cfg.arm_dist, cfg.arm_means, cfg.arm_sigma);
  ReplicaResult res;
  res.replica = replica;
  res.seed = replica_seed(cfg.seed, replica);
  const std::size_t n = env.n_arms();
  res.play_counts.assign(n, 0);

  const Exp3Config bandit = cfg.exp3(n);
  Exp3State state = init_state(bandit);
  RewardWindow window;
  Rng arms(child_seed(res.seed, Stream::Arms));
  Rng payoffs(child_seed(res.seed, Stream::Env));
  const double best = env.best_mean();
  const auto marks = downsample_marks(cfg.steps);
  std::size_t next_mark = 0;
  double regret = 0.0;

  for (std::size_t t = 0; t < cfg.steps; ++t) {
    Distribution dist = policy(state, bandit);
    const std::size_t arm = sample_arm(dist, arms);
    const double payoff = env.pull(arm, payoffs);
    const double scaled = cfg.rescale ? window.push_and_rescale(payoff) : std::clamp(payoff, -1.0, 1.0);
    update(state, arm, scaled, dist.probs[arm], bandit);
    ++res.play_counts[arm];
    regret += best - env.means()[arm];
    if (next_mark < marks.size() && t + 1 == marks[next_mark]) {
      res.regret_curve.emplace_back(t + 1, regret);
      ++next_mark;
    }
    if (sink) {
      StepRecord rec;
      rec.t = t;
      rec.arm = arm;
      rec.probs = std::move(dist.probs);
      rec.raw_reward = payoff;
      rec.scaled_reward = scaled;
      sink(rec);
    }
    ++res.records;
  }
  res.regret = regret;
  return res;
}

}  // namespace facetbandit
