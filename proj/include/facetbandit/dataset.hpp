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

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "facetbandit/errors.hpp"
#include "facetbandit/random.hpp"

namespace facetbandit {

/// One training or dev example. `target` holds a real value for regression
/// and a class id for classification.
struct Example {
  std::vector<double> features;
  double target = 0.0;
  std::size_t facet = 0;
};

using Batch = std::vector<const Example*>;

/// n disjoint training facets plus a dev set with equal counts per facet.
struct FacetedDataset {
  std::vector<std::string> names;
  std::vector<std::vector<Example>> facets;
  std::vector<Example> dev;

  std::size_t n_facets() const noexcept { return facets.size(); }

  std::vector<std::size_t> counts() const {
    std::vector<std::size_t> c;
    c.reserve(facets.size());
    for (const auto& f : facets) c.push_back(f.size());
    return c;
  }

  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& f : facets) n += f.size();
    return n;
  }

  std::size_t input_dim() const {
    for (const auto& f : facets)
      if (!f.empty()) return f.front().features.size();
    return 0;
  }

  /// Throws ConfigError when a facet is empty, the dev set is unbalanced, or
  /// feature dimensions disagree.
  void validate() const {
    if (facets.empty()) throw ConfigError("dataset has no facets");
    if (names.size() != facets.size()) throw ConfigError("dataset: one name per facet required");
    const std::size_t dim = input_dim();
    for (std::size_t f = 0; f < facets.size(); ++f) {
      if (facets[f].empty()) throw ConfigError("facet '" + names[f] + "' is empty");
      for (const auto& ex : facets[f]) {
        if (ex.features.size() != dim) throw ConfigError("facet '" + names[f] + "': inconsistent feature dimension");
        if (ex.facet != f) throw ConfigError("facet '" + names[f] + "': example carries wrong facet id");
      }
    }
    if (dev.empty()) throw ConfigError("dev set is empty");
    std::vector<std::size_t> per(facets.size(), 0);
    for (const auto& ex : dev) {
      if (ex.facet >= facets.size()) throw ConfigError("dev example refers to unknown facet");
      if (ex.features.size() != dim) throw ConfigError("dev set: inconsistent feature dimension");
      ++per[ex.facet];
    }
    for (std::size_t f = 1; f < per.size(); ++f)
      if (per[f] != per[0]) throw ConfigError("dev set is not facet-balanced");
  }
};

/// k indices from [0, n). Without replacement (Floyd's algorithm) when k <= n,
/// otherwise i.i.d. with replacement.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> out;
  out.reserve(k);
  if (k > n) {
    for (std::size_t i = 0; i < k; ++i) out.push_back(rng.index(n));
    return out;
  }
  std::unordered_set<std::size_t> seen;
  seen.reserve(2 * k);
  for (std::size_t j = n - k; j < n; ++j) {
    const std::size_t t = rng.index(j + 1);
    if (seen.insert(t).second) {
      out.push_back(t);
    } else {
      seen.insert(j);
      out.push_back(j);
    }
  }
  return out;
}

inline Batch sample_batch(const std::vector<Example>& pool, std::size_t batch_size, Rng& rng) {
  Batch batch;
  batch.reserve(batch_size);
  for (std::size_t i : sample_indices(pool.size(), batch_size, rng)) batch.push_back(&pool[i]);
  return batch;
}

inline Batch all_of(const std::vector<Example>& pool) {
  Batch batch;
  batch.reserve(pool.size());
  for (const auto& ex : pool) batch.push_back(&ex);
  return batch;
}

}  // namespace facetbandit
