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

// One training step under each scheduling policy: the EXP3 curriculum,
// a static facet distribution with single-facet batches, and mixed batches.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "facetbandit/bandit_core.hpp"
#include "facetbandit/dataset.hpp"
#include "facetbandit/errors.hpp"
#include "facetbandit/learner.hpp"
#include "facetbandit/random.hpp"
#include "facetbandit/rewards.hpp"
#include "facetbandit/samplers.hpp"

namespace facetbandit {

struct StepRecord {
  std::size_t t = 0;
  std::optional<std::size_t> arm;  // empty for mixed batches
  std::vector<double> probs;
  std::optional<double> raw_reward;
  std::optional<double> scaled_reward;
  double loss_before = 0.0;
  double loss_after = 0.0;
  std::optional<double> dev_loss;
  std::vector<std::size_t> batch_facets;  // per-facet example counts, mixed batches only
};

/// Independent random streams of one replica. Arm choice has its own stream,
/// so a bandit with exploration rate 1 and the static uniform schedule draw
/// the same arm sequence from the same seed.
struct StepStreams {
  Rng arms;
  Rng data;
  Rng eval;

  explicit StepStreams(std::uint64_t replica_seed)
      : arms(child_seed(replica_seed, Stream::Arms)),
        data(child_seed(replica_seed, Stream::Data)),
        eval(child_seed(replica_seed, Stream::Eval)) {}
};

struct StepOptions {
  std::size_t batch_size = 16;
  std::size_t eval_batch_size = 64;
};

namespace detail {

inline void check_losses(const StepLosses& l, std::size_t t) {
  if (!std::isfinite(l.before) || !std::isfinite(l.after))
    throw RuntimeAbort("learner produced a non-finite loss at step " + std::to_string(t) +
                       " (before=" + std::to_string(l.before) + ", after=" + std::to_string(l.after) + ")");
}

}  // namespace detail

/// policy -> draw arm -> batch from that facet -> learner update -> reward ->
/// rescale -> EXP3 update.
inline StepRecord run_curriculum_step(Exp3State& state, const Exp3Config& config, Learner& learner,
                                      const FacetedDataset& data, RewardKind kind, RewardWindow& window,
                                      StepStreams& rng, const StepOptions& opt) {
  if (config.n_arms != data.n_facets()) throw ContractError("bandit arms and dataset facets differ");
  StepRecord rec;
  rec.t = state.step;
  Distribution dist = policy(state, config);
  const std::size_t arm = sample_arm(dist, rng.arms);
  const double prob = dist.probs[arm];
  rec.arm = arm;

  const Batch batch = sample_batch(data.facets[arm], opt.batch_size, rng.data);

  Batch dev_batch;
  double dev_before = 0.0;
  if (kind.uses_dev()) {
    dev_batch = sample_eval_batch(data, opt.eval_batch_size, rng.eval);
    dev_before = learner.eval(dev_batch);
  }
  const StepLosses losses = learner.train_step(batch);
  detail::check_losses(losses, rec.t);
  rec.loss_before = losses.before;
  rec.loss_after = losses.after;

  StepLosses measured = losses;
  if (kind.uses_dev()) {
    measured = {dev_before, learner.eval(dev_batch)};
    detail::check_losses(measured, rec.t);
  }
  double raw = 0.0;
  try {
    raw = raw_reward(kind.measure, measured.before, measured.after);
  } catch (const ArithmeticError& e) {
    throw RuntimeAbort(std::string(e.what()) + " at step " + std::to_string(rec.t));
  }
  const double scaled = window.push_and_rescale(raw);
  update(state, arm, scaled, prob, config);

  rec.raw_reward = raw;
  rec.scaled_reward = scaled;
  rec.probs = std::move(dist.probs);
  return rec;
}

/// Single-facet batch from a fixed facet distribution.
inline StepRecord run_static_step(std::size_t t, const StaticSchedule& schedule, Learner& learner,
                                  const FacetedDataset& data, StepStreams& rng, const StepOptions& opt) {
  StepRecord rec;
  rec.t = t;
  const std::size_t arm = schedule.next(rng.arms);
  rec.arm = arm;
  rec.probs = schedule.distribution().probs;
  const StepLosses losses = learner.train_step(sample_batch(data.facets[arm], opt.batch_size, rng.data));
  detail::check_losses(losses, t);
  rec.loss_before = losses.before;
  rec.loss_after = losses.after;
  return rec;
}

/// Heterogeneous batch: every example independently picks a facet from
/// `dist`, then a uniform example inside it. With the size-proportional
/// distribution this is uniform sampling from the concatenated data.
inline StepRecord run_mixed_step(std::size_t t, const Distribution& dist, Learner& learner,
                                 const FacetedDataset& data, StepStreams& rng, const StepOptions& opt) {
  StepRecord rec;
  rec.t = t;
  rec.probs = dist.probs;
  rec.batch_facets.assign(data.n_facets(), 0);
  Batch batch;
  batch.reserve(opt.batch_size);
  for (std::size_t i = 0; i < opt.batch_size; ++i) {
    const std::size_t f = sample_arm(dist, rng.arms);
    ++rec.batch_facets[f];
    const auto& pool = data.facets[f];
    batch.push_back(&pool[rng.data.index(pool.size())]);
  }
  const StepLosses losses = learner.train_step(batch);
  detail::check_losses(losses, t);
  rec.loss_before = losses.before;
  rec.loss_after = losses.after;
  return rec;
}

}  // namespace facetbandit
