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

// facetbandit: curriculum scheduling experiments from the command line.
//
//   facetbandit run     [options]          one experiment (exp3, static or mixed)
//   facetbandit sweep   [options]          EXP3 grid over --mu_grid x --gamma_grid
//   facetbandit regret  [options]          EXP3 on the stochastic bandit testbed
//   facetbandit report  DIR... [--out D]   aggregate finished runs
//
// Every option can also come from a key = value file given by --config; flags
// on the command line win. Exit codes: 0 ok, 1 configuration error, 2 runtime abort.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "facetbandit.hpp"

namespace {

using namespace facetbandit;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeAbort = 2;

struct CliOptions {
  ExperimentConfig cfg;
  std::string scheduler = "exp3";
  std::string reward = "dev-pg";
  std::string tau;
  std::string learner = "regression";
  std::string arm_dist = "bernoulli";
  double step_size = NAN;
  std::vector<std::string> report_dirs;
  std::string report_out = "report";

  ExperimentConfig resolve() {
    ExperimentConfig c = cfg;
    c.scheduler = parse_scheduler(scheduler);
    c.reward = RewardKind::parse(reward);
    if (!tau.empty()) c.preset = tau;
    c.learner = parse_task_kind(learner);
    c.arm_dist = parse_payoff_kind(arm_dist);
    if (!std::isnan(step_size)) c.step_size = step_size;
    c.validate();
    return c;
  }
};

void add_experiment_options(CLI::App& app, CliOptions& o) {
  auto& c = o.cfg;
  app.add_option("--scheduler", o.scheduler, "exp3, static or mixed")->capture_default_str();
  app.add_option("--preset", c.preset, "static/mixed facet distribution: uniform, proportional, upsampled, inverse-proportional")
      ->capture_default_str();
  app.add_option("--tau", o.tau, "numeric sampling temperature (overrides --preset)");
  app.add_option("--reward", o.reward, "loss, pg, pgnorm, dev-loss, dev-pg or dev-pgnorm")->capture_default_str();
  app.add_option("--steps", c.steps, "training steps T")->capture_default_str();
  app.add_option("--batch_size", c.batch_size)->capture_default_str();
  app.add_option("--eval_batch_size", c.eval_batch_size, "dev batch size for dev-* rewards")->capture_default_str();
  app.add_option("--eval_every", c.eval_every, "full dev evaluation interval")->capture_default_str();
  app.add_option("--replicas", c.replicas)->capture_default_str();
  app.add_option("--seed", c.seed, "master seed")->capture_default_str();
  app.add_option("--threads", c.threads, "replica threads, 0 = all cores")->capture_default_str();
  app.add_option("--output_dir", c.output_dir, "relative paths resolve under $FACETBANDIT_OUTPUT_ROOT if set")
      ->capture_default_str();
  app.add_option("--exploration_rate,--gamma", c.exploration_rate)->capture_default_str();
  app.add_option("--learning_rate,--mu", c.learning_rate, "bandit learning rate")->capture_default_str();
  app.add_option("--weight_cap", c.weight_cap)->capture_default_str();
  app.add_option("--task", c.task, "synthetic task: skewed or separable")->capture_default_str();
  app.add_option("--data_dir", c.data_dir, "facet directory to load instead of a synthetic task");
  app.add_option("--learner", o.learner, "regression or classification")->capture_default_str();
  app.add_option("--classes", c.classes)->capture_default_str();
  app.add_option("--step_size", o.step_size, "learner SGD step size");
  app.add_option("--arm_means", c.arm_means, "testbed arm means")->delimiter(',');
  app.add_option("--arm_dist", o.arm_dist, "bernoulli or gaussian")->capture_default_str();
  app.add_option("--arm_sigma", c.arm_sigma)->capture_default_str();
  app.add_flag("--rescale,!--no-rescale", c.rescale, "route testbed payoffs through the quantile rescaler");
  app.add_flag("--log_steps,!--no-log_steps", c.log_steps, "write steps.jsonl");
  app.add_option("--mu_grid", c.mu_grid)->delimiter(',');
  app.add_option("--gamma_grid", c.gamma_grid)->delimiter(',');
  app.add_option("--horizon", c.horizon, "sweep early-stopping horizon")->capture_default_str();
}

void print_summary(const RunSummary& s, const fs::path& dir) {
  for (const auto& r : s.replicas) {
    std::printf("replica %zu: %s", r.replica, r.aborted ? "ABORTED" : "ok");
    if (std::isfinite(r.best_dev_loss))
      std::printf("  best dev loss %.6g at step %zu  final %.6g", r.best_dev_loss, r.best_step, r.final_dev_loss);
    if (std::isfinite(r.regret)) std::printf("  regret %.6g", r.regret);
    std::printf("  fractions");
    for (double f : r.play_fractions()) std::printf(" %.3f", f);
    if (r.aborted) std::printf("  (%s)", r.error.c_str());
    std::printf("\n");
  }
  std::printf("wrote %s\n", dir.string().c_str());
}

std::optional<FacetedDataset> maybe_load(const ExperimentConfig& c) {
  if (c.data_dir.empty()) return std::nullopt;
  return load_facet_directory(c.data_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EXP3 data-curriculum scheduling for multi-facet training"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key = value file with experiment options");
  CliOptions opt;
  add_experiment_options(app, opt);
  auto* run = app.add_subcommand("run", "run one experiment");
  auto* sweep_cmd = app.add_subcommand("sweep", "grid search over bandit learning and exploration rates");
  bool sweep_testbed = false;
  sweep_cmd->add_flag("--testbed", sweep_testbed, "sweep on the stochastic bandit testbed, ranked by regret");
  auto* regret = app.add_subcommand("regret", "run EXP3 on the stochastic bandit testbed");
  auto* report_cmd = app.add_subcommand("report", "aggregate completed run directories");
  report_cmd->add_option("dirs", opt.report_dirs, "run directories")->required();
  report_cmd->add_option("--out", opt.report_out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    const ExperimentConfig cfg = opt.resolve();
    if (run->parsed()) {
      const auto data = maybe_load(cfg);
      const fs::path dir = resolve_output_dir(cfg.output_dir);
      const RunSummary s = run_to_directory(cfg, dir, false, data ? &*data : nullptr);
      print_summary(s, dir);
      return s.any_aborted() ? kRuntimeAbort : kOk;
    }
    if (regret->parsed()) {
      const fs::path dir = resolve_output_dir(cfg.output_dir);
      const RunSummary s = run_to_directory(cfg, dir, true);
      print_summary(s, dir);
      return kOk;
    }
    if (sweep_cmd->parsed()) {
      const auto data = maybe_load(cfg);
      const fs::path dir = resolve_output_dir(cfg.output_dir);
      const auto cells = sweep(cfg, dir, sweep_testbed, data ? &*data : nullptr);
      for (std::size_t i = 0; i < cells.size(); ++i)
        std::printf("%2zu  mu=%-8g gamma=%-6g %s %.6g\n", i + 1, cells[i].mu, cells[i].gamma,
                    cells[i].failed ? "FAILED" : (sweep_testbed ? "regret" : "best_dev_loss"), cells[i].metric);
      std::printf("wrote %s\n", (dir / "sweep.csv").string().c_str());
      return kOk;
    }
    if (report_cmd->parsed()) {
      std::vector<fs::path> dirs(opt.report_dirs.begin(), opt.report_dirs.end());
      const fs::path out = resolve_output_dir(opt.report_out);
      const auto runs = report(dirs, out);
      std::printf("aggregated %zu run(s) into %s\n", runs.size(), out.string().c_str());
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "aborted: %s\n", e.what());
    return kRuntimeAbort;
  }
  return kOk;
}
