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

// Static facet-sampling baselines: p(f) = softmax_f(ln(n_f / N) / tau).
// tau = 1 is size-proportional, tau -> infinity uniform, tau = -1
// inverse-proportional, tau > 1 upsamples small facets.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "facetbandit/bandit_core.hpp"
#include "facetbandit/errors.hpp"
#include "facetbandit/format.hpp"
#include "facetbandit/random.hpp"

namespace facetbandit {

struct FacetCounts {
  std::vector<std::size_t> counts;

  void validate() const {
    if (counts.empty()) throw ConfigError("facet counts are empty");
    for (std::size_t c : counts)
      if (c == 0) throw ConfigError("facet with zero examples");
  }
};

class Temperature {
 public:
  static Temperature infinity() { return Temperature(); }

  explicit Temperature(double value) : value_(value) {
    if (value == 0.0 || !std::isfinite(value))
      throw ConfigError("temperature must be a nonzero finite number or 'inf'");
  }

  bool is_infinite() const noexcept { return infinite_; }
  double value() const noexcept { return infinite_ ? std::numeric_limits<double>::infinity() : value_; }

  /// Accepts the preset names, "inf"/"infinity", or a number.
  static Temperature parse(std::string_view s) {
    if (s == "uniform" || s == "inf" || s == "infinity") return infinity();
    if (s == "proportional") return Temperature(1.0);
    if (s == "upsampled") return Temperature(5.0);
    if (s == "inverse-proportional") return Temperature(-1.0);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ConfigError("unknown temperature preset '" + std::string(s) + "'");
    return Temperature(v);
  }

  std::string name() const {
    return infinite_ ? "inf" : format_double(value_);
  }

 private:
  Temperature() : infinite_(true) {}

  double value_ = 0.0;
  bool infinite_ = false;
};

inline Distribution temperature_distribution(const FacetCounts& counts, const Temperature& tau) {
  counts.validate();
  const std::size_t n = counts.counts.size();
  if (tau.is_infinite()) return Distribution{std::vector<double>(n, 1.0 / static_cast<double>(n))};
  double total = 0.0;
  for (std::size_t c : counts.counts) total += static_cast<double>(c);
  std::vector<double> logits(n);
  for (std::size_t f = 0; f < n; ++f)
    logits[f] = std::log(static_cast<double>(counts.counts[f]) / total) / tau.value();
  return Distribution{softmax(logits)};
}

/// I.i.d. arm draws from a fixed distribution; one uniform per draw, the same
/// protocol as the bandit's `sample_arm`.
class StaticSchedule {
 public:
  explicit StaticSchedule(Distribution dist) : dist_(std::move(dist)) {
    if (!is_valid_distribution(dist_, 1e-9)) throw ConfigError("static schedule needs a valid distribution");
  }

  std::size_t next(Rng& rng) const { return sample_arm(dist_, rng); }
  const Distribution& distribution() const noexcept { return dist_; }

 private:
  Distribution dist_;
};

}  // namespace facetbandit
