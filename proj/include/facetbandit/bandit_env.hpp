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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "facetbandit/errors.hpp"
#include "facetbandit/random.hpp"

namespace facetbandit {

enum class PayoffKind { Bernoulli, Gaussian };

inline PayoffKind parse_payoff_kind(std::string_view s) {
  if (s == "bernoulli") return PayoffKind::Bernoulli;
  if (s == "gaussian") return PayoffKind::Gaussian;
  throw ConfigError("unknown arm distribution '" + std::string(s) + "' (expected bernoulli or gaussian)");
}

/// Stationary stochastic bandit with known arm means, used as a regret testbed.
class StochasticBanditEnv {
 public:
  StochasticBanditEnv(PayoffKind kind, std::vector<double> means, double sigma = 1.0)
      : kind_(kind), means_(std::move(means)), sigma_(sigma) {
    if (means_.empty()) throw ConfigError("bandit environment needs at least one arm");
    for (double m : means_) {
      if (!std::isfinite(m)) throw ConfigError("arm means must be finite");
      if (kind_ == PayoffKind::Bernoulli && !(m >= 0.0 && m <= 1.0))
        throw ConfigError("Bernoulli arm means must lie in [0, 1]");
    }
    if (kind_ == PayoffKind::Gaussian && !(sigma_ >= 0.0)) throw ConfigError("Gaussian sigma must be nonnegative");
  }

  /// `n_arms` arms with mean `base`, except arm `best` with mean `best_mean`.
  static StochasticBanditEnv one_best(std::size_t n_arms, std::size_t best, double best_mean, double base) {
    std::vector<double> means(n_arms, base);
    means.at(best) = best_mean;
    return StochasticBanditEnv(PayoffKind::Bernoulli, std::move(means));
  }

  double pull(std::size_t arm, Rng& rng) const {
    const double m = means_.at(arm);
    if (kind_ == PayoffKind::Bernoulli) return rng.bernoulli(m) ? 1.0 : 0.0;
    return m + sigma_ * rng.normal();
  }

  std::size_t n_arms() const noexcept { return means_.size(); }
  const std::vector<double>& means() const noexcept { return means_; }
  PayoffKind kind() const noexcept { return kind_; }
  double best_mean() const { return *std::max_element(means_.begin(), means_.end()); }

 private:
  PayoffKind kind_;
  std::vector<double> means_;
  double sigma_;
};

/// T * max_a mean_a - sum_t mean_{a_t}: shortfall against the best arm.
inline double pseudo_regret(const StochasticBanditEnv& env, std::span<const std::size_t> played) {
  const double best = env.best_mean();
  double regret = 0.0;
  for (std::size_t a : played) regret += best - env.means().at(a);
  return regret;
}

}  // namespace facetbandit
