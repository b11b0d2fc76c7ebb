// Copyright 2026 The Hopf Control Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// hopf_cli: runs a JSON scenario and prints one JSON record on stdout.
//
//   hopf_cli configs/double_integrator_min_time.json --out results/
//
// Exit codes: 0 ok, 1 config error, 2 not converged, 3 no bracket.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hopf/scenario.h"

namespace {

hopf::Vector ToVector(const std::vector<double>& values) {
  return Eigen::Map<const hopf::Vector>(values.data(),
                                        static_cast<Eigen::Index>(values.size()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid-free time-optimal control via the generalized Hopf formula"};
  std::string config_path;
  hopf::RunOptions options;
  std::optional<std::string> kind;
  std::vector<double> x0;
  std::optional<double> horizon, t_max, tau, epsilon;
  std::optional<int> max_iter, quadrature_n, mc_samples, trials;
  std::optional<std::uint64_t> seed;

  app.add_option("config", config_path, "Scenario JSON file")->required();
  app.add_option("--out", options.out_dir, "Directory for CSV output");
  app.add_option("--workers", options.workers,
                 "Worker threads for grid sweeps (0: all cores)");
  app.add_flag("--emit-gnuplot", options.emit_gnuplot,
               "Also write whitespace-separated .dat files");
  app.add_option("--kind", kind, "Override query.kind");
  app.add_option("--x0", x0, "Override query.x0");
  app.add_option("--T", horizon, "Override query.T");
  app.add_option("--t-max", t_max, "Override query.t_max");
  app.add_option("--tau", tau, "Override solver.tau");
  app.add_option("--epsilon", epsilon, "Override solver.epsilon");
  app.add_option("--max-iter", max_iter, "Override solver.max_iter");
  app.add_option("--quadrature-n", quadrature_n, "Override solver.quadrature_n");
  app.add_option("--mc-samples", mc_samples, "Override query.mc_samples");
  app.add_option("--trials", trials, "Override query.trials");
  app.add_option("--seed", seed, "Override query.seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? hopf::kExitOk : hopf::kExitConfigError;
  }

  hopf::ScenarioConfig config;
  try {
    config = hopf::LoadScenario(config_path);
    hopf::QueryConfig& q = config.query;
    if (kind) {
      // Re-parse the kind through the same validation path as the file.
      const hopf::QueryKind kinds[] = {
          hopf::QueryKind::kValue, hopf::QueryKind::kMinTime,
          hopf::QueryKind::kGrid, hopf::QueryKind::kTrajectory,
          hopf::QueryKind::kUnscented, hopf::QueryKind::kBench};
      bool found = false;
      for (hopf::QueryKind k : kinds) {
        if (*kind == hopf::ToString(k)) {
          q.kind = k;
          found = true;
        }
      }
      if (!found) throw hopf::ConfigError("--kind: unknown value '" + *kind + "'");
    }
    if (!x0.empty()) {
      if (static_cast<Eigen::Index>(x0.size()) != config.problem.system.n()) {
        throw hopf::ConfigError("--x0 has wrong length");
      }
      q.x0 = ToVector(x0);
    }
    if (horizon) q.horizon = *horizon;
    if (t_max) q.t_max = *t_max;
    if (tau) config.solver.tau = *tau;
    if (epsilon) config.solver.epsilon = *epsilon;
    if (max_iter) config.solver.max_iter = *max_iter;
    if (quadrature_n) config.problem.quadrature_n = *quadrature_n;
    if (mc_samples) q.mc_samples = *mc_samples;
    if (trials) q.trials = *trials;
    if (seed) q.seed = *seed;
    hopf::CheckValid(config.problem);
    hopf::CheckValid(config.solver);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return hopf::kExitConfigError;
  }

  try {
    return hopf::RunScenario(config, options, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hopf::kExitConfigError;
  }
}
