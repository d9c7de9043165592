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

// Synthetic faceted learning tasks that stand in for multi-domain corpora.
//
// Inputs are laid out as [shared block | private block of facet 0 | ... ].
// An example of facet f has standard-normal shared features, private features
// drawn with standard deviation `feature_scale` in its own block, and zeros in
// every other facet's block. The true model mixes a shared parameter vector
// (weight `sharing`) with a facet-private one (weight 1 - sharing); each part
// carries that fraction of the target's signal variance.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "facetbandit/dataset.hpp"
#include "facetbandit/errors.hpp"
#include "facetbandit/learner.hpp"
#include "facetbandit/random.hpp"

namespace facetbandit {

enum class TaskKind { Regression, Classification };

struct FacetSpec {
  std::string name;
  std::size_t count = 1000;
  std::size_t private_dim = 8;
  double noise = -1.0;  // negative: drawn from the task's noise range
  double feature_scale = 1.0;
  double sharing = 0.5;
  bool corrupted = false;  // training targets carry no signal, only noise
};

struct SurrogateTaskSpec {
  TaskKind kind = TaskKind::Regression;
  std::size_t classes = 3;
  std::size_t shared_dim = 8;
  std::vector<FacetSpec> facets;
  std::size_t dev_per_facet = 200;
  bool clean_dev = false;  // dev targets without noise or corruption
  double noise_lo = 0.1;
  double noise_hi = 1.5;
  double step_size = 0.03;  // SGD step of the surrogate learner
  double init_scale = 0.0;

  std::size_t input_dim() const {
    std::size_t d = shared_dim;
    for (const auto& f : facets) d += f.private_dim;
    return d;
  }

  void validate() const {
    if (facets.empty()) throw ConfigError("surrogate task needs at least one facet");
    if (kind == TaskKind::Classification && classes < 2) throw ConfigError("classification needs >= 2 classes");
    if (!(noise_lo >= 0.0 && noise_hi >= noise_lo)) throw ConfigError("invalid noise range");
    if (!(step_size >= 0.0)) throw ConfigError("step_size must be nonnegative");
    if (dev_per_facet == 0) throw ConfigError("dev_per_facet must be positive");
    for (const auto& f : facets) {
      if (f.count == 0) throw ConfigError("facet '" + f.name + "' has zero examples");
      if (!(f.feature_scale > 0.0)) throw ConfigError("facet '" + f.name + "': feature_scale must be positive");
      if (!(f.sharing >= 0.0 && f.sharing <= 1.0)) throw ConfigError("facet '" + f.name + "': sharing must lie in [0, 1]");
      if (f.sharing > 0.0 && shared_dim == 0) throw ConfigError("facet '" + f.name + "' shares parameters but shared_dim is 0");
      if (f.sharing < 1.0 && f.private_dim == 0) throw ConfigError("facet '" + f.name + "' needs private_dim > 0 unless sharing is 1");
    }
  }

  /// Five facets with the size skew of a multi-domain corpus (medical, IT,
  /// law, Koran, subtitles at 1/100 scale). Facets differ in private feature
  /// scale, so they need different amounts of training to fit.
  static SurrogateTaskSpec skewed_default() {
    SurrogateTaskSpec s;
    s.facets = {
        {"med", 2480, 8, -1.0, 1.0, 0.5, false},
        {"it", 4673, 8, -1.0, 0.6, 0.5, false},
        {"law", 2229, 8, -1.0, 0.4, 0.5, false},
        {"koran", 180, 8, -1.0, 0.25, 0.5, false},
        {"subs", 5000, 8, -1.0, 1.0, 0.5, false},
    };
    return s;
  }

  /// Two facets over the same inputs: "clean" is noiseless, "noisy" has
  /// targets that are pure noise. Only training on "clean" can lower the loss
  /// on the (clean) dev set.
  static SurrogateTaskSpec separable() {
    SurrogateTaskSpec s;
    s.shared_dim = 8;
    s.facets = {
        {"clean", 2000, 0, 0.0, 1.0, 1.0, false},
        {"noisy", 2000, 0, 2.0, 1.0, 1.0, true},
    };
    s.clean_dev = true;
    s.step_size = 0.05;
    return s;
  }
};

namespace detail {

inline std::vector<double> unit_gaussian(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  double norm = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (double& x : v) x /= norm;
  return v;
}

}  // namespace detail

struct SurrogateTask {
  FacetedDataset data;
  std::vector<double> noise;  // realized per-facet noise scale
};

/// Generates train facets and a balanced dev set. Deterministic in `seed`.
inline SurrogateTask make_surrogate_task(const SurrogateTaskSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  const std::size_t n = spec.facets.size();
  const std::size_t dim = spec.input_dim();
  const std::size_t rows = spec.kind == TaskKind::Regression ? 1 : spec.classes;
  // Class logits are scaled up so labels are mostly determined by the inputs.
  const double logit_gain = spec.kind == TaskKind::Regression ? 1.0 : 3.0;

  std::vector<std::size_t> offset(n);
  std::size_t next = spec.shared_dim;
  for (std::size_t f = 0; f < n; ++f) {
    offset[f] = next;
    next += spec.facets[f].private_dim;
  }

  std::vector<std::vector<double>> shared(rows), priv(rows * n);
  for (std::size_t r = 0; r < rows; ++r) {
    shared[r] = detail::unit_gaussian(spec.shared_dim, rng);
    for (std::size_t f = 0; f < n; ++f) {
      priv[r * n + f] = detail::unit_gaussian(spec.facets[f].private_dim, rng);
      for (double& w : priv[r * n + f]) w /= spec.facets[f].feature_scale;
    }
  }

  SurrogateTask task;
  task.noise.resize(n);
  for (std::size_t f = 0; f < n; ++f) {
    const auto& fs = spec.facets[f];
    task.noise[f] = fs.noise >= 0.0 ? fs.noise : spec.noise_lo + (spec.noise_hi - spec.noise_lo) * rng.uniform();
  }

  auto draw = [&](std::size_t f, bool dev) {
    const auto& fs = spec.facets[f];
    Example ex;
    ex.facet = f;
    ex.features.assign(dim, 0.0);
    for (std::size_t j = 0; j < spec.shared_dim; ++j) ex.features[j] = rng.normal();
    for (std::size_t j = 0; j < fs.private_dim; ++j) ex.features[offset[f] + j] = fs.feature_scale * rng.normal();

    const bool clean = dev && spec.clean_dev;
    const double a = std::sqrt(fs.sharing);
    const double b = std::sqrt(1.0 - fs.sharing);
    std::vector<double> logits(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      double z = 0.0;
      for (std::size_t j = 0; j < spec.shared_dim; ++j) z += a * shared[r][j] * ex.features[j];
      const auto& p = priv[r * n + f];
      for (std::size_t j = 0; j < fs.private_dim; ++j) z += b * p[j] * ex.features[offset[f] + j];
      z *= logit_gain;
      if (!clean && fs.corrupted) z = 0.0;
      if (!clean) z += task.noise[f] * rng.normal();
      logits[r] = z;
    }
    if (spec.kind == TaskKind::Regression) {
      ex.target = logits[0];
    } else {
      std::size_t best = 0;
      for (std::size_t r = 1; r < rows; ++r)
        if (logits[r] > logits[best]) best = r;
      ex.target = static_cast<double>(best);
    }
    return ex;
  };

  auto& data = task.data;
  data.facets.resize(n);
  for (std::size_t f = 0; f < n; ++f) {
    data.names.push_back(spec.facets[f].name.empty() ? "facet" + std::to_string(f) : spec.facets[f].name);
    data.facets[f].reserve(spec.facets[f].count);
    for (std::size_t i = 0; i < spec.facets[f].count; ++i) data.facets[f].push_back(draw(f, false));
  }
  for (std::size_t f = 0; f < n; ++f)
    for (std::size_t i = 0; i < spec.dev_per_facet; ++i) data.dev.push_back(draw(f, true));
  return task;
}

inline std::unique_ptr<Learner> make_learner(TaskKind kind, std::size_t input_dim, std::size_t classes,
                                             double step_size, double init_scale, std::uint64_t seed) {
  if (kind == TaskKind::Regression)
    return std::make_unique<LinearRegressor>(input_dim, SquaredError{}, step_size, init_scale, seed);
  return std::make_unique<SoftmaxClassifier>(input_dim, SoftmaxCrossEntropy{classes}, step_size, init_scale, seed);
}

inline std::unique_ptr<Learner> make_surrogate_learner(const SurrogateTaskSpec& spec, std::uint64_t seed) {
  spec.validate();
  return make_learner(spec.kind, spec.input_dim(), spec.classes, spec.step_size, spec.init_scale, seed);
}

}  // namespace facetbandit
