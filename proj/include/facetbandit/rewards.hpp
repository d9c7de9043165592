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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "facetbandit/dataset.hpp"
#include "facetbandit/errors.hpp"
#include "facetbandit/random.hpp"

namespace facetbandit {

enum class ProgressMeasure { Loss, Pg, PgNorm };
enum class EvalSource { TrainBatch, DevBatch };

struct RewardKind {
  ProgressMeasure measure = ProgressMeasure::Pg;
  EvalSource source = EvalSource::DevBatch;

  bool uses_dev() const noexcept { return source == EvalSource::DevBatch; }

  /// One of loss, pg, pgnorm, dev-loss, dev-pg, dev-pgnorm.
  std::string name() const {
    std::string base = measure == ProgressMeasure::Loss ? "loss" : measure == ProgressMeasure::Pg ? "pg" : "pgnorm";
    return uses_dev() ? "dev-" + base : base;
  }

  static RewardKind parse(std::string_view s) {
    RewardKind k;
    k.source = EvalSource::TrainBatch;
    if (s.substr(0, 4) == "dev-") {
      k.source = EvalSource::DevBatch;
      s.remove_prefix(4);
    }
    if (s == "loss") k.measure = ProgressMeasure::Loss;
    else if (s == "pg") k.measure = ProgressMeasure::Pg;
    else if (s == "pgnorm") k.measure = ProgressMeasure::PgNorm;
    else throw ConfigError("unknown reward kind '" + std::string(s) +
                           "' (expected loss, pg, pgnorm, dev-loss, dev-pg or dev-pgnorm)");
    return k;
  }

  friend bool operator==(const RewardKind&, const RewardKind&) = default;
};

/// Raw learning-progress signal. `loss_before` is L(theta_t), `loss_after` is
/// L(theta_{t+1}) on the same evaluation batch.
inline double raw_reward(ProgressMeasure measure, double loss_before, double loss_after) {
  if (!std::isfinite(loss_before) || !std::isfinite(loss_after))
    throw ContractError("raw_reward: non-finite loss");
  switch (measure) {
    case ProgressMeasure::Loss:
      return loss_before;
    case ProgressMeasure::Pg:
      return loss_before - loss_after;
    case ProgressMeasure::PgNorm:
      if (loss_before == 0.0) throw ArithmeticError("pgnorm reward undefined for zero pre-update loss");
      return 1.0 - loss_after / loss_before;
  }
  return 0.0;
}

/// Quantile of sorted data, linear interpolation between order statistics
/// at position (n - 1) * q.
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ContractError("quantile of empty data");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Sliding window over the most recent raw rewards. Maps a reward linearly to
/// [-1, 1] so that the low quantile goes to -1 and the high quantile to +1,
/// clipping outside.
class RewardWindow {
 public:
  static constexpr std::size_t kDefaultCapacity = 5000;

  explicit RewardWindow(std::size_t capacity = kDefaultCapacity, double lo_quantile = 0.2,
                        double hi_quantile = 0.8)
      : capacity_(capacity), lo_q_(lo_quantile), hi_q_(hi_quantile) {
    if (capacity_ == 0) throw ConfigError("reward window capacity must be positive");
    if (!(0.0 <= lo_q_ && lo_q_ < hi_q_ && hi_q_ <= 1.0)) throw ConfigError("reward window quantiles out of order");
    ring_.reserve(capacity_);
    sorted_.reserve(capacity_);
  }

  /// Appends `raw` (evicting the oldest value when full), then rescales it
  /// against the quantiles of the updated window.
  double push_and_rescale(double raw) {
    if (!std::isfinite(raw)) throw ContractError("push_and_rescale: non-finite reward");
    push(raw);
    const double lo = sorted_quantile(sorted_, lo_q_);
    const double hi = sorted_quantile(sorted_, hi_q_);
    if (hi - lo < 1e-12) return 0.0;
    const double unit = std::clamp((raw - lo) / (hi - lo), 0.0, 1.0);
    return unit * 2.0 - 1.0;
  }

  double lo_quantile() const { return sorted_quantile(sorted_, lo_q_); }
  double hi_quantile() const { return sorted_quantile(sorted_, hi_q_); }
  std::size_t size() const noexcept { return sorted_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  void push(double raw) {
    if (ring_.size() < capacity_) {
      ring_.push_back(raw);
    } else {
      const double old = ring_[head_];
      ring_[head_] = raw;
      head_ = (head_ + 1) % capacity_;
      sorted_.erase(std::lower_bound(sorted_.begin(), sorted_.end(), old));
    }
    sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), raw), raw);
  }

  std::size_t capacity_;
  double lo_q_;
  double hi_q_;
  std::vector<double> ring_;    // insertion order; head_ is the oldest once full
  std::size_t head_ = 0;
  std::vector<double> sorted_;  // same multiset as ring_, ascending
};

/// Uniform dev batch. Sampled without replacement when the dev set is large
/// enough, with replacement otherwise.
inline Batch sample_eval_batch(const FacetedDataset& data, std::size_t batch_size, Rng& rng) {
  if (data.dev.empty()) throw ConfigError("sample_eval_batch: dev set is empty");
  if (batch_size == 0) throw ConfigError("sample_eval_batch: batch size must be positive");
  return sample_batch(data.dev, batch_size, rng);
}

}  // namespace facetbandit
