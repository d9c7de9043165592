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
#include <memory>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "facetbandit/environments.hpp"
#include "facetbandit/experiment.hpp"

namespace facetbandit {
namespace {

// ---- surrogate task ----

TEST(SurrogateTask, ShapeAndBalance) {
  const auto spec = SurrogateTaskSpec::skewed_default();
  const auto task = make_surrogate_task(spec, 42);
  const auto& d = task.data;
  ASSERT_EQ(d.n_facets(), 5u);
  EXPECT_EQ(d.counts(), (std::vector<std::size_t>{2480, 4673, 2229, 180, 5000}));
  EXPECT_NO_THROW(d.validate());
  EXPECT_EQ(d.dev.size(), 5 * spec.dev_per_facet);
  for (std::size_t f = 0; f < 5; ++f) {
    for (const auto& ex : d.facets[f]) {
      ASSERT_EQ(ex.facet, f);
      ASSERT_EQ(ex.features.size(), spec.input_dim());
    }
    EXPECT_GE(task.noise[f], spec.noise_lo);
    EXPECT_LE(task.noise[f], spec.noise_hi);
  }
}

TEST(SurrogateTask, PrivateBlocksAreDisjoint) {
  const auto spec = SurrogateTaskSpec::skewed_default();
  const auto task = make_surrogate_task(spec, 1);
  std::size_t offset = spec.shared_dim;
  for (std::size_t f = 0; f < 5; ++f) {
    const std::size_t end = offset + spec.facets[f].private_dim;
    for (const auto& ex : task.data.facets[f])
      for (std::size_t j = spec.shared_dim; j < ex.features.size(); ++j)
        if (j < offset || j >= end) {
          ASSERT_EQ(ex.features[j], 0.0);
        }
    offset = end;
  }
}

TEST(SurrogateTask, DeterministicInSeed) {
  const auto spec = SurrogateTaskSpec::skewed_default();
  const auto a = make_surrogate_task(spec, 9), b = make_surrogate_task(spec, 9), c = make_surrogate_task(spec, 10);
  EXPECT_EQ(a.data.facets[3][17].features, b.data.facets[3][17].features);
  EXPECT_EQ(a.data.dev[5].target, b.data.dev[5].target);
  EXPECT_NE(a.data.facets[3][17].features, c.data.facets[3][17].features);
}

TEST(SurrogateTask, InvalidSpecs) {
  auto s = SurrogateTaskSpec::skewed_default();
  s.facets[2].count = 0;
  EXPECT_THROW(make_surrogate_task(s, 1), ConfigError);
  s = SurrogateTaskSpec::skewed_default();
  s.facets.clear();
  EXPECT_THROW(make_surrogate_task(s, 1), ConfigError);
  s = SurrogateTaskSpec::skewed_default();
  s.facets[0].private_dim = 0;
  EXPECT_THROW(make_surrogate_task(s, 1), ConfigError);
  s = SurrogateTaskSpec::skewed_default();
  s.noise_lo = -1;
  EXPECT_THROW(make_surrogate_task(s, 1), ConfigError);
}

TEST(FacetedDataset, ValidationErrors) {
  FacetedDataset d;
  d.names = {"a", "b"};
  d.facets = {{Example{{1.0}, 0.0, 0}}, {}};
  d.dev = {Example{{1.0}, 0.0, 0}, Example{{1.0}, 0.0, 1}};
  EXPECT_THROW(d.validate(), ConfigError);  // empty facet
  d.facets[1].push_back(Example{{1.0}, 0.0, 1});
  EXPECT_NO_THROW(d.validate());
  d.dev.push_back(Example{{1.0}, 0.0, 0});
  EXPECT_THROW(d.validate(), ConfigError);  // unbalanced dev
}

TEST(SampleIndices, WithoutReplacementAreDistinct) {
  Rng rng(3);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 1 + rng.index(50);
    const std::size_t m = rng.index(n + 1);
    const auto idx = sample_indices(n, m, rng);
    ASSERT_EQ(idx.size(), m);
    std::set<std::size_t> u(idx.begin(), idx.end());
    ASSERT_EQ(u.size(), m);
    for (auto i : idx) ASSERT_LT(i, n);
  }
}

// ---- curriculum step ----

struct Fixture {
  FacetedDataset data;
  std::unique_ptr<Learner> learner;
};

Fixture skewed(std::uint64_t seed) {
  const auto spec = SurrogateTaskSpec::skewed_default();
  return {make_surrogate_task(spec, seed).data, make_surrogate_learner(spec, seed)};
}

TEST(CurriculumStep, PureExplorationIsUniform) {
  auto fx = skewed(1);
  const Exp3Config cfg{5, 1.0, 0.1, 50.0};
  auto state = init_state(cfg);
  RewardWindow window;
  StepStreams rng(7);
  std::vector<int> hits(5, 0);
  const int n = 10000;
  for (int t = 0; t < n; ++t) {
    const auto rec = run_curriculum_step(state, cfg, *fx.learner, fx.data, RewardKind::parse("pg"), window, rng, {});
    ++hits[*rec.arm];
  }
  for (int h : hits) EXPECT_NEAR(h, n * 0.2, 3 * std::sqrt(n * 0.2 * 0.8));
}

TEST(CurriculumStep, SingleFacetEqualsPlainTraining) {
  SurrogateTaskSpec spec;
  spec.facets = {{"only", 300, 4, 0.2, 1.0, 0.5, false}};
  const auto data = make_surrogate_task(spec, 3).data;
  auto curriculum = make_surrogate_learner(spec, 4);
  auto plain = make_surrogate_learner(spec, 4);
  const Exp3Config cfg{1, 0.1, 0.1, 50.0};
  auto state = init_state(cfg);
  RewardWindow window;
  StepStreams rng(5);
  Rng plain_data(child_seed(5, Stream::Data));
  for (int t = 0; t < 500; ++t) {
    const auto rec = run_curriculum_step(state, cfg, *curriculum, data, RewardKind::parse("dev-pg"), window, rng, {});
    ASSERT_EQ(*rec.arm, 0u);
    ASSERT_EQ(rec.probs, std::vector<double>{1.0});
    plain->train_step(sample_batch(data.facets[0], 16, plain_data));
  }
  EXPECT_EQ(curriculum->parameter_hash(), plain->parameter_hash());
}

TEST(CurriculumStep, RecordsValidDistributions) {
  auto fx = skewed(2);
  const Exp3Config cfg{5, 0.2, 0.1, 50.0};
  auto state = init_state(cfg);
  RewardWindow window;
  StepStreams rng(8);
  for (const char* kind : {"loss", "pg", "pgnorm", "dev-loss", "dev-pg", "dev-pgnorm"}) {
    for (int t = 0; t < 200; ++t) {
      const auto rec = run_curriculum_step(state, cfg, *fx.learner, fx.data, RewardKind::parse(kind), window, rng, {});
      ASSERT_TRUE(is_valid_distribution(Distribution{rec.probs}));
      ASSERT_GE(*rec.scaled_reward, -1.0);
      ASSERT_LE(*rec.scaled_reward, 1.0);
    }
  }
}

// Checks that evaluation never changes parameters.
class PurityProbe final : public Learner {
 public:
  explicit PurityProbe(std::unique_ptr<Learner> inner) : inner_(std::move(inner)) {}
  StepLosses train_step(const Batch& b) override { return inner_->train_step(b); }
  double eval(const Batch& b) const override {
    const auto h = inner_->parameter_hash();
    const double l = inner_->eval(b);
    if (inner_->parameter_hash() != h) ++violations;
    ++evals;
    return l;
  }
  std::uint64_t parameter_hash() const override { return inner_->parameter_hash(); }
  mutable int evals = 0;
  mutable int violations = 0;

 private:
  std::unique_ptr<Learner> inner_;
};

TEST(CurriculumStep, DevRewardsDoNotMutateLearner) {
  auto fx = skewed(3);
  PurityProbe probe(std::move(fx.learner));
  const Exp3Config cfg{5, 0.2, 0.1, 50.0};
  auto state = init_state(cfg);
  RewardWindow window;
  StepStreams rng(9);
  for (int t = 0; t < 300; ++t)
    run_curriculum_step(state, cfg, probe, fx.data, RewardKind::parse("dev-pgnorm"), window, rng, {});
  EXPECT_EQ(probe.evals, 600);  // before and after each update
  EXPECT_EQ(probe.violations, 0);
}

class DivergingLearner final : public Learner {
 public:
  StepLosses train_step(const Batch&) override { return {1.0, NAN}; }
  double eval(const Batch&) const override { return 1.0; }
  std::uint64_t parameter_hash() const override { return 0; }
};

TEST(CurriculumStep, NonFiniteLossAborts) {
  auto fx = skewed(4);
  DivergingLearner bad;
  const Exp3Config cfg{5, 0.2, 0.1, 50.0};
  auto state = init_state(cfg);
  RewardWindow window;
  StepStreams rng(1);
  EXPECT_THROW(run_curriculum_step(state, cfg, bad, fx.data, RewardKind::parse("pg"), window, rng, {}), RuntimeAbort);
  EXPECT_EQ(state.step, 0u);
}

TEST(CurriculumStep, ArmCountMustMatchFacets) {
  auto fx = skewed(5);
  const Exp3Config cfg{3, 0.2, 0.1, 50.0};
  auto state = init_state(cfg);
  RewardWindow window;
  StepStreams rng(1);
  EXPECT_THROW(run_curriculum_step(state, cfg, *fx.learner, fx.data, RewardKind::parse("pg"), window, rng, {}),
               ContractError);
}

TEST(CurriculumRun, FullExplorationMatchesStaticUniformArms) {
  ExperimentConfig c;
  c.steps = 3000;
  c.seed = 77;
  c.exploration_rate = 1.0;
  std::vector<std::size_t> bandit_arms, static_arms;
  run_replica(c, 0, [&](const StepRecord& r) { bandit_arms.push_back(*r.arm); });
  c.scheduler = SchedulerKind::Static;
  c.preset = "uniform";
  run_replica(c, 0, [&](const StepRecord& r) { static_arms.push_back(*r.arm); });
  EXPECT_EQ(bandit_arms, static_arms);
}

TEST(CurriculumRun, SeparableTaskPrefersCleanFacet) {
  // Brute-force oracle: train with each single facet and compare dev losses.
  ExperimentConfig c;
  c.task = "separable";
  c.steps = 20000;
  c.seed = 3;
  c.exploration_rate = 0.1;
  c.learning_rate = 0.01;
  std::vector<double> oracle_dev(2);
  for (std::size_t arm = 0; arm < 2; ++arm) {
    World w = make_world(c, replica_seed(c.seed, 0), nullptr);
    Rng data(1);
    for (int t = 0; t < 2000; ++t) w.learner->train_step(sample_batch(w.data.facets[arm], 16, data));
    oracle_dev[arm] = w.learner->eval(all_of(w.data.dev));
  }
  ASSERT_LT(oracle_dev[0], oracle_dev[1]);

  std::size_t late = 0, late_clean = 0;
  run_replica(c, 0, [&](const StepRecord& r) {
    if (r.t >= 18000) {
      ++late;
      late_clean += *r.arm == 0;
    }
  });
  EXPECT_GT(static_cast<double>(late_clean) / late, 0.8);
}

// ---- stochastic bandit testbed ----

TEST(PseudoRegret, OptimalPlayIsZero) {
  const StochasticBanditEnv env(PayoffKind::Bernoulli, {0.3, 0.7, 0.5});
  const std::vector<std::size_t> arms(500, 1);
  EXPECT_EQ(pseudo_regret(env, arms), 0.0);
}

TEST(PseudoRegret, GapTimesSteps) {
  const StochasticBanditEnv env(PayoffKind::Bernoulli, {0.7, 0.5});
  const std::vector<std::size_t> arms(100, 1);
  EXPECT_NEAR(pseudo_regret(env, arms), 20.0, 1e-9);
}

TEST(PseudoRegret, UniformPlayClosedForm) {
  // E[regret] = (0.7 - 0.6) * T; per step the regret is 0 or 0.2 with prob 1/2,
  // so sd = 0.1 * sqrt(T).
  const StochasticBanditEnv env(PayoffKind::Bernoulli, {0.7, 0.5});
  const std::size_t T = 10000;
  const double expected = 0.1 * T, sd = 0.1 * std::sqrt(static_cast<double>(T));
  Rng rng(11);
  const Distribution uniform{{0.5, 0.5}};
  double mc_sum = 0;
  const int runs = 200;
  for (int r = 0; r < runs; ++r) {
    std::vector<std::size_t> arms(T);
    for (auto& a : arms) a = sample_arm(uniform, rng);
    const double regret = pseudo_regret(env, arms);
    if (r == 0) {
      EXPECT_NEAR(regret, expected, 3 * sd);
    }
    mc_sum += regret;
  }
  EXPECT_NEAR(mc_sum / runs, expected, 3 * sd / std::sqrt(static_cast<double>(runs)));
}

TEST(StochasticBanditEnv, Payoffs) {
  const StochasticBanditEnv env(PayoffKind::Bernoulli, {0.0, 1.0, 0.25});
  Rng rng(12);
  int ones = 0;
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(env.pull(0, rng), 0.0);
    EXPECT_EQ(env.pull(1, rng), 1.0);
  }
  const int n = 40000;
  for (int i = 0; i < n; ++i) ones += env.pull(2, rng) == 1.0;
  EXPECT_NEAR(ones, n * 0.25, 3 * std::sqrt(n * 0.25 * 0.75));
  const StochasticBanditEnv g(PayoffKind::Gaussian, {1.5}, 0.0);
  EXPECT_EQ(g.pull(0, rng), 1.5);
}

TEST(StochasticBanditEnv, Validation) {
  EXPECT_THROW(StochasticBanditEnv(PayoffKind::Bernoulli, {}), ConfigError);
  EXPECT_THROW(StochasticBanditEnv(PayoffKind::Bernoulli, {1.2}), ConfigError);
  EXPECT_THROW(StochasticBanditEnv(PayoffKind::Gaussian, {NAN}), ConfigError);
  EXPECT_THROW(StochasticBanditEnv(PayoffKind::Gaussian, {0.0}, -1.0), ConfigError);
  EXPECT_THROW(parse_payoff_kind("poisson"), ConfigError);
}

TEST(RegretReplica, LearnsBestArm) {
  ExperimentConfig c;
  c.steps = 20000;
  c.arm_means = {0.2, 0.8, 0.2};
  c.exploration_rate = 0.1;
  c.learning_rate = 0.01;
  const auto r = run_regret_replica(c, 0, {});
  EXPECT_GT(r.play_fractions()[1], 0.8);
  EXPECT_LT(r.regret, 0.6 * c.steps * 2.0 / 3.0);  // well below uniform play
  EXPECT_LE(r.regret_curve.size(), 500u);
  EXPECT_EQ(r.regret_curve.back().first, c.steps);
  EXPECT_DOUBLE_EQ(r.regret_curve.back().second, r.regret);
}

}  // namespace
}  // namespace facetbandit
