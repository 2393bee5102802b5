// Copyright 2026 The softstride Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// softstride: scenario runner and estimator replay.
//
//   softstride sim     <config> [--seed N] --out log.csv
//   softstride replay  <config> --log log.csv [--seed N] --out est.csv
//   softstride metrics <config> --log log.csv --estimates est.csv --out m.csv
//   softstride sweep   <config> [--log log.csv] [--seed N] --out sweep.csv
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "softstride/error.h"
#include "softstride/harness.h"

namespace {

using softstride::Error;
using softstride::ErrorCode;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNumericalInstability:
    case ErrorCode::kCovarianceNotPD:
    case ErrorCode::kSingularJacobian:
    case ErrorCode::kDegenerateMatrix:
      return 3;
    default:
      return 2;
  }
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  return os;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"softstride: legged state estimation on rigid and soft terrain"};
  app.require_subcommand(1);

  std::string config_path, out_path, log_path, est_path, tidy_path;
  std::optional<uint64_t> seed;
  std::vector<double> epsilons;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment config (YAML)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the scenario seed");
    sub->add_option("--out", out_path, "output file")->required();
  };

  CLI::App* sim = app.add_subcommand("sim", "run a scenario, write the log");
  add_common(sim);

  CLI::App* rep = app.add_subcommand("replay", "run the estimator over a log");
  add_common(rep);
  rep->add_option("--log", log_path, "input log")->required();
  rep->add_option("--tidy", tidy_path, "also write long-format CSV");

  CLI::App* met = app.add_subcommand("metrics", "compare estimates to truth");
  add_common(met);
  met->add_option("--log", log_path, "log with ground truth")->required();
  met->add_option("--estimates", est_path, "estimate trace")->required();

  CLI::App* swp = app.add_subcommand("sweep", "contact threshold sweep");
  add_common(swp);
  swp->add_option("--log", log_path, "reuse a log instead of simulating");
  swp->add_option("--eps", epsilons, "threshold values (N)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    softstride::ExperimentConfig cfg = softstride::load_config_file(config_path);
    if (seed) {
      cfg.scenario.seed = *seed;
      cfg.replay.seed = *seed;
    }

    if (*sim) {
      const auto log = softstride::run_scenario(cfg.scenario);
      auto os = OpenOut(out_path);
      softstride::save_log(os, log);
    } else if (*rep) {
      const auto log = softstride::load_log_file(log_path);
      const auto trace = softstride::replay(log, cfg.replay);
      auto os = OpenOut(out_path);
      softstride::save_estimates(os, trace);
      if (!tidy_path.empty()) {
        auto ts = OpenOut(tidy_path);
        softstride::save_estimates_tidy(ts, trace);
      }
    } else if (*met) {
      const auto log = softstride::load_log_file(log_path);
      std::ifstream is(est_path, std::ios::binary);
      if (!is) throw Error(ErrorCode::kInvalidArgument, "cannot read " + est_path);
      const auto trace = softstride::load_estimates(is);
      const auto report = softstride::compute_metrics(trace, log.mcs, cfg.metrics);
      auto os = OpenOut(out_path);
      softstride::save_metrics(os, report);
    } else if (*swp) {
      const auto log = log_path.empty() ? softstride::run_scenario(cfg.scenario)
                                        : softstride::load_log_file(log_path);
      if (epsilons.empty()) epsilons = cfg.sweep_epsilons;
      const auto rows = softstride::epsilon_sweep(log, cfg.replay, epsilons,
                                                  cfg.metrics, cfg.workers);
      auto os = OpenOut(out_path);
      softstride::save_sweep(os, rows);
    }
  } catch (const Error& e) {
    std::cerr << "softstride: " << e.what() << "\n";
    if (e.code() == ErrorCode::kInvalidArgument) return 1;
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "softstride: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
