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
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "facetbandit/samplers.hpp"

namespace facetbandit {
namespace {

double entropy(const Distribution& d) {
  double h = 0.0;
  for (double p : d.probs)
    if (p > 0) h -= p * std::log(p);
  return h;
}

TEST(Temperature, ProportionalAtOne) {
  const auto d = temperature_distribution({{90, 10}}, Temperature(1.0));
  EXPECT_NEAR(d[0], 0.9, 1e-12);
  EXPECT_NEAR(d[1], 0.1, 1e-12);
}

TEST(Temperature, UniformAtInfinity) {
  const auto d = temperature_distribution({{90, 10}}, Temperature::infinity());
  EXPECT_EQ(d[0], 0.5);
  EXPECT_EQ(d[1], 0.5);
}

TEST(Temperature, InverseProportional) {
  // Reciprocals 1/0.9 and 1/0.1 normalized: (1/0.9) / (1/0.9 + 10) = 0.1.
  const double r0 = 1.0 / 0.9, r1 = 1.0 / 0.1;
  const auto d = temperature_distribution({{90, 10}}, Temperature(-1.0));
  EXPECT_NEAR(d[0], r0 / (r0 + r1), 1e-12);
  EXPECT_NEAR(d[1], r1 / (r0 + r1), 1e-12);
  EXPECT_NEAR(d[0], 0.1, 1e-12);
}

TEST(Temperature, Errors) {
  EXPECT_THROW(Temperature(0.0), ConfigError);
  EXPECT_THROW(Temperature(NAN), ConfigError);
  EXPECT_THROW(temperature_distribution({{5, 0, 3}}, Temperature(1.0)), ConfigError);
  EXPECT_THROW(temperature_distribution({{}}, Temperature(1.0)), ConfigError);
  EXPECT_THROW(Temperature::parse("warm"), ConfigError);
  EXPECT_THROW(Temperature::parse("0"), ConfigError);
}

TEST(Temperature, Presets) {
  EXPECT_TRUE(Temperature::parse("uniform").is_infinite());
  EXPECT_TRUE(Temperature::parse("inf").is_infinite());
  EXPECT_EQ(Temperature::parse("proportional").value(), 1.0);
  EXPECT_EQ(Temperature::parse("upsampled").value(), 5.0);
  EXPECT_EQ(Temperature::parse("inverse-proportional").value(), -1.0);
  EXPECT_EQ(Temperature::parse("2.5").value(), 2.5);
  EXPECT_EQ(Temperature::parse("-1").value(), -1.0);
}

TEST(TemperatureProperty, EqualCountsAreUniform) {
  for (const auto& tau : {Temperature(-1.0), Temperature(0.5), Temperature(1.0), Temperature(5.0), Temperature::infinity()}) {
    for (std::size_t n : {1u, 2u, 5u, 17u}) {
      const auto d = temperature_distribution({std::vector<std::size_t>(n, 123)}, tau);
      for (double p : d.probs) EXPECT_NEAR(p, 1.0 / n, 1e-12);
    }
  }
}

TEST(TemperatureProperty, EntropyOrdering) {
  Rng rng(21);
  for (int k = 0; k < 500; ++k) {
    FacetCounts c;
    const std::size_t n = 2 + rng.index(8);
    for (std::size_t i = 0; i < n; ++i) c.counts.push_back(1 + rng.index(100000));
    const double h1 = entropy(temperature_distribution(c, Temperature(1.0)));
    const double hot = entropy(temperature_distribution(c, Temperature(1.0 + 10 * rng.uniform())));
    const double cold = entropy(temperature_distribution(c, Temperature(0.05 + 0.9 * rng.uniform())));
    ASSERT_GE(hot, h1 - 1e-12);
    ASSERT_LE(cold, h1 + 1e-12);
  }
}

TEST(TemperatureProperty, ScaleInvariant) {
  Rng rng(22);
  for (int k = 0; k < 500; ++k) {
    FacetCounts c, scaled;
    const std::size_t n = 1 + rng.index(8);
    const std::size_t factor = 1 + rng.index(1000);
    for (std::size_t i = 0; i < n; ++i) {
      c.counts.push_back(1 + rng.index(10000));
      scaled.counts.push_back(c.counts.back() * factor);
    }
    const double tau = rng.bernoulli(0.5) ? -1.0 : 0.2 + 6 * rng.uniform();
    const auto a = temperature_distribution(c, Temperature(tau));
    const auto b = temperature_distribution(scaled, Temperature(tau));
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(TemperatureProperty, ProportionalMatchesCounts) {
  Rng rng(23);
  for (int k = 0; k < 500; ++k) {
    FacetCounts c;
    const std::size_t n = 1 + rng.index(10);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      c.counts.push_back(1 + rng.index(1000000));
      total += static_cast<double>(c.counts.back());
    }
    const auto d = temperature_distribution(c, Temperature(1.0));
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(d[i], c.counts[i] / total, 1e-12);
  }
}

TEST(StaticSchedule, Degenerate) {
  const StaticSchedule s(Distribution{{1.0, 0.0, 0.0}});
  Rng rng(24);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(s.next(rng), 0u);
}

TEST(StaticSchedule, UniformFrequencies) {
  const StaticSchedule s(Distribution{{0.25, 0.25, 0.25, 0.25}});
  Rng rng(25);
  const int n = 200000;
  std::vector<int> hits(4, 0);
  for (int i = 0; i < n; ++i) ++hits[s.next(rng)];
  for (int h : hits) EXPECT_NEAR(h, n * 0.25, 3 * std::sqrt(n * 0.25 * 0.75));
}

TEST(StaticSchedule, ProportionalOverCorpusSizes) {
  // Facet sizes in thousands of sentence pairs: Koran, Law, Medical, IT, Subtitles.
  const FacetCounts c{{18000, 222900, 248000, 467300, 500000}};
  const StaticSchedule s(temperature_distribution(c, Temperature(1.0)));
  double total = 0;
  for (auto v : c.counts) total += static_cast<double>(v);
  Rng rng(26);
  const int n = 200000;
  std::vector<int> hits(5, 0);
  for (int i = 0; i < n; ++i) ++hits[s.next(rng)];
  for (std::size_t f = 0; f < 5; ++f) {
    const double p = c.counts[f] / total;
    EXPECT_NEAR(hits[f], n * p, 3 * std::sqrt(n * p * (1 - p))) << "facet " << f;
  }
}

TEST(StaticSchedule, RejectsInvalidDistribution) {
  EXPECT_THROW(StaticSchedule(Distribution{{0.5, 0.6}}), ConfigError);
}

}  // namespace
}  // namespace facetbandit
