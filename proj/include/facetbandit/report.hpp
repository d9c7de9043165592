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

// Aggregation over completed run directories (see runner.hpp for the layout).
//
// Writes
//   aggregate.csv   one row per run: mean/std of final and best dev loss,
//                   regret, and mean play fraction per arm
//   timeline.csv    per run and downsample mark: replica-mean policy
//                   probabilities, play fractions, and regret mean/std

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "facetbandit/errors.hpp"
#include "facetbandit/runner.hpp"

namespace facetbandit {

struct RunAggregate {
  std::string label;
  bool testbed = false;
  std::string scheduler;
  std::string reward;
  std::string preset;
  double mu = NAN;
  double gamma = NAN;
  std::size_t steps = 0;
  std::size_t replicas = 0;
  std::size_t aborted = 0;
  double final_dev_loss_mean = NAN, final_dev_loss_std = NAN;
  double best_dev_loss_mean = NAN, best_dev_loss_std = NAN;
  double regret_mean = NAN, regret_std = NAN;
  std::vector<double> play_fraction_mean;

  // Timeline, replica means.
  std::vector<std::size_t> marks;
  std::vector<std::vector<double>> prob_mean;    // [mark][arm]
  std::vector<std::vector<double>> played_mean;  // [mark][arm]
  std::vector<double> regret_curve_mean, regret_curve_std;
};

namespace detail {

inline json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw AggregationError("cannot read " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw AggregationError("malformed " + p.string() + ": " + e.what());
  }
}

inline double json_num(const json& j) { return j.is_number() ? j.get<double>() : NAN; }

inline std::vector<std::vector<double>> read_numeric_csv(const fs::path& p, std::size_t& columns) {
  std::ifstream in(p);
  if (!in) throw AggregationError("cannot read " + p.string());
  std::string line;
  std::getline(in, line);
  columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    for (;;) {
      const std::size_t end = line.find(',', start);
      const std::string cell = line.substr(start, end == std::string::npos ? std::string::npos : end - start);
      try {
        row.push_back(cell.empty() ? NAN : std::stod(cell));
      } catch (const std::exception&) {
        throw AggregationError("malformed number '" + cell + "' in " + p.string());
      }
      if (end == std::string::npos) break;
      start = end + 1;
    }
    if (row.size() != columns) throw AggregationError("ragged row in " + p.string());
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void mean_std(const std::vector<double>& values, double& mean, double& sd) {
  std::vector<double> finite;
  for (double v : values)
    if (std::isfinite(v)) finite.push_back(v);
  mean = finite.empty() ? NAN : mean_of(finite);
  sd = finite.empty() ? NAN : stddev_of(finite);
}

}  // namespace detail

inline RunAggregate aggregate_run(const fs::path& dir) {
  const json summary = detail::read_json(dir / "summary.json");
  const json& cfg = summary.at("config");
  RunAggregate a;
  a.label = dir.filename().string();
  if (a.label.empty()) a.label = dir.parent_path().filename().string();
  a.testbed = summary.value("testbed", false);
  a.scheduler = a.testbed ? "exp3" : cfg.at("scheduler").get<std::string>();
  a.reward = a.testbed ? "payoff" : cfg.at("reward").get<std::string>();
  a.preset = a.scheduler == "exp3" ? "" : cfg.at("preset").get<std::string>();
  if (a.scheduler == "exp3") {
    a.mu = cfg.at("learning_rate").get<double>();
    a.gamma = cfg.at("exploration_rate").get<double>();
  }
  a.steps = cfg.at("steps").get<std::size_t>();

  std::vector<double> finals, bests, regrets;
  std::vector<std::vector<double>> fractions;
  for (const auto& r : summary.at("replicas")) {
    ++a.replicas;
    if (r.at("status") != "ok") {
      ++a.aborted;
      continue;
    }
    finals.push_back(detail::json_num(r.at("final_dev_loss")));
    bests.push_back(detail::json_num(r.at("best_dev_loss")));
    regrets.push_back(detail::json_num(r.at("regret")));
    fractions.push_back(r.at("play_fractions").get<std::vector<double>>());
  }
  if (a.replicas == 0) throw AggregationError(dir.string() + " has no replicas");
  detail::mean_std(finals, a.final_dev_loss_mean, a.final_dev_loss_std);
  detail::mean_std(bests, a.best_dev_loss_mean, a.best_dev_loss_std);
  detail::mean_std(regrets, a.regret_mean, a.regret_std);
  if (!fractions.empty()) {
    a.play_fraction_mean.assign(fractions.front().size(), 0.0);
    for (const auto& f : fractions) {
      if (f.size() != a.play_fraction_mean.size()) throw AggregationError(dir.string() + ": replicas disagree on arm count");
      for (std::size_t k = 0; k < f.size(); ++k) a.play_fraction_mean[k] += f[k] / static_cast<double>(fractions.size());
    }
  }

  // Timelines of successful replicas.
  std::vector<std::vector<std::vector<double>>> tables;
  std::size_t columns = 0;
  for (const auto& r : summary.at("replicas")) {
    if (r.at("status") != "ok") continue;
    char name[32];
    std::snprintf(name, sizeof(name), "replica_%03zu", r.at("replica").get<std::size_t>());
    const fs::path p = dir / name / "timeline.csv";
    if (!fs::exists(p)) continue;
    std::size_t cols = 0;
    tables.push_back(detail::read_numeric_csv(p, cols));
    if (columns != 0 && cols != columns) throw AggregationError(dir.string() + ": timelines disagree on columns");
    columns = cols;
    if (tables.back().size() != tables.front().size()) throw AggregationError(dir.string() + ": timelines differ in length");
  }
  if (!tables.empty()) {
    const std::size_t n = (columns - 2) / 2;
    if (!a.play_fraction_mean.empty() && n != a.play_fraction_mean.size())
      throw AggregationError(dir.string() + ": timeline arm count mismatch");
    for (std::size_t m = 0; m < tables.front().size(); ++m) {
      a.marks.push_back(static_cast<std::size_t>(tables.front()[m][0]));
      std::vector<double> pm(n, 0.0), fm(n, 0.0), reg;
      for (const auto& t : tables) {
        if (static_cast<std::size_t>(t[m][0]) != a.marks.back()) throw AggregationError(dir.string() + ": timeline marks differ");
        for (std::size_t k = 0; k < n; ++k) {
          pm[k] += t[m][1 + k] / static_cast<double>(tables.size());
          fm[k] += t[m][1 + n + k] / static_cast<double>(tables.size());
        }
        reg.push_back(t[m][1 + 2 * n]);
      }
      double rm = NAN, rs = NAN;
      detail::mean_std(reg, rm, rs);
      a.prob_mean.push_back(std::move(pm));
      a.played_mean.push_back(std::move(fm));
      a.regret_curve_mean.push_back(rm);
      a.regret_curve_std.push_back(rs);
    }
  }
  return a;
}

/// Aggregates run directories into `out_dir`. All runs must share the arm
/// count and the kind of world (learner vs bandit testbed).
inline std::vector<RunAggregate> report(const std::vector<fs::path>& run_dirs, const fs::path& out_dir) {
  if (run_dirs.empty()) throw ConfigError("report needs at least one run directory");
  std::vector<RunAggregate> runs;
  for (const auto& d : run_dirs) runs.push_back(aggregate_run(d));
  const auto& first = runs.front();
  for (const auto& r : runs) {
    if (r.testbed != first.testbed)
      throw AggregationError("cannot aggregate bandit-testbed runs together with learner runs");
    if (r.play_fraction_mean.size() != first.play_fraction_mean.size())
      throw AggregationError("runs '" + first.label + "' and '" + r.label + "' have different arm counts");
  }
  const std::size_t n = first.play_fraction_mean.size();

  detail::ensure_dir(out_dir);
  {
    auto out = detail::open_out(out_dir / "aggregate.csv");
    out << "run,scheduler,reward,preset,mu,gamma,steps,replicas,aborted,final_dev_loss_mean,final_dev_loss_std,"
           "best_dev_loss_mean,best_dev_loss_std,regret_mean,regret_std";
    for (std::size_t k = 0; k < n; ++k) out << ",play_fraction_" << k;
    out << '\n';
    for (const auto& r : runs) {
      out << detail::csv_safe(r.label) << ',' << r.scheduler << ',' << r.reward << ',' << r.preset << ','
          << detail::num(r.mu) << ',' << detail::num(r.gamma) << ',' << r.steps << ',' << r.replicas << ','
          << r.aborted << ',' << detail::num(r.final_dev_loss_mean) << ',' << detail::num(r.final_dev_loss_std) << ','
          << detail::num(r.best_dev_loss_mean) << ',' << detail::num(r.best_dev_loss_std) << ','
          << detail::num(r.regret_mean) << ',' << detail::num(r.regret_std);
      for (double f : r.play_fraction_mean) out << ',' << detail::num(f);
      out << '\n';
    }
  }
  {
    auto out = detail::open_out(out_dir / "timeline.csv");
    out << "run,steps";
    for (std::size_t k = 0; k < n; ++k) out << ",prob_" << k;
    for (std::size_t k = 0; k < n; ++k) out << ",played_" << k;
    out << ",regret_mean,regret_std\n";
    for (const auto& r : runs) {
      for (std::size_t m = 0; m < r.marks.size(); ++m) {
        out << detail::csv_safe(r.label) << ',' << r.marks[m];
        for (double p : r.prob_mean[m]) out << ',' << detail::num(p);
        for (double p : r.played_mean[m]) out << ',' << detail::num(p);
        out << ',' << detail::num(r.regret_curve_mean[m]) << ',' << detail::num(r.regret_curve_std[m]) << '\n';
      }
    }
  }
  return runs;
}

}  // namespace facetbandit
