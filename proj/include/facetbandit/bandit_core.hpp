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

// EXP3 over a finite set of arms (one arm per data facet).
//
//   policy:  pi(a) = (1 - gamma) * softmax(w)[a] + gamma / n
//   update:  w[a_t] += mu * y_t / pi_t(a_t)
//
// y is treated as a reward: positive values make the played arm more likely.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "facetbandit/errors.hpp"
#include "facetbandit/random.hpp"

namespace facetbandit {

struct Exp3Config {
  std::size_t n_arms = 1;
  double exploration_rate = 0.1;  // gamma
  double learning_rate = 0.01;    // mu
  // When the largest weight exceeds this, every weight is shifted down by the
  // maximum. Softmax is shift invariant so the policy does not change.
  double weight_cap = 50.0;

  void validate() const {
    if (n_arms < 1) throw ConfigError("n_arms must be >= 1");
    if (!(exploration_rate >= 0.0 && exploration_rate <= 1.0))
      throw ConfigError("exploration_rate must lie in [0, 1], got " + std::to_string(exploration_rate));
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
      throw ConfigError("learning_rate must be a positive finite number, got " + std::to_string(learning_rate));
    if (!(weight_cap > 0.0)) throw ConfigError("weight_cap must be positive");
  }
};

struct Exp3State {
  std::vector<double> weights;
  std::size_t step = 0;
};

/// A probability vector over arms.
struct Distribution {
  std::vector<double> probs;

  std::size_t size() const noexcept { return probs.size(); }
  double operator[](std::size_t a) const { return probs[a]; }
};

inline bool is_valid_distribution(const Distribution& d, double tol = 1e-12) {
  if (d.probs.empty()) return false;
  double sum = 0.0;
  for (double p : d.probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tol;
}

inline Exp3State init_state(const Exp3Config& config) {
  config.validate();
  return Exp3State{std::vector<double>(config.n_arms, 0.0), 0};
}

/// Max-subtracted softmax.
inline std::vector<double> softmax(const std::vector<double>& logits) {
  if (logits.empty()) return {};
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

inline Distribution policy(const Exp3State& state, const Exp3Config& config) {
  if (state.weights.size() != config.n_arms)
    throw ContractError("policy: state has " + std::to_string(state.weights.size()) +
                        " weights but config has " + std::to_string(config.n_arms) + " arms");
  const double gamma = config.exploration_rate;
  const double floor = gamma / static_cast<double>(config.n_arms);
  Distribution d{softmax(state.weights)};
  for (double& p : d.probs) p = (1.0 - gamma) * p + floor;
  return d;
}

/// Inverse-CDF draw consuming exactly one uniform from `rng`. Rounding residue
/// in the cumulative sum is absorbed by the last arm with positive mass.
inline std::size_t sample_arm(const Distribution& dist, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t a = 0; a < dist.probs.size(); ++a) {
    if (dist.probs[a] <= 0.0) continue;
    last_positive = a;
    cumulative += dist.probs[a];
    if (u < cumulative) return a;
  }
  return last_positive;
}

/// `prob` must be the probability the policy gave `arm` when it was drawn.
inline void update(Exp3State& state, std::size_t arm, double scaled_reward, double prob,
                   const Exp3Config& config) {
  if (state.weights.size() != config.n_arms) throw ContractError("update: dimension mismatch");
  if (arm >= state.weights.size()) throw ContractError("update: arm index out of range");
  if (!(prob > 0.0) || !std::isfinite(prob))
    throw ContractError("update: sampling probability must be positive, got " + std::to_string(prob));
  if (!std::isfinite(scaled_reward)) throw ContractError("update: reward is not finite");

  state.weights[arm] += config.learning_rate * scaled_reward / prob;
  ++state.step;

  const double top = *std::max_element(state.weights.begin(), state.weights.end());
  if (top > config.weight_cap) {
    for (double& w : state.weights) w -= top;
  }
}

/// Index of the largest entry, lowest index on ties.
inline std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace facetbandit
