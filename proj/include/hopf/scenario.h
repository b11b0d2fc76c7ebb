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

#ifndef HOPF_SCENARIO_H_
#define HOPF_SCENARIO_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopf/grid_eval.h"
#include "hopf/problem.h"
#include "hopf/time_optimal.h"

namespace hopf {

/// Malformed or invalid scenario file; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class QueryKind { kValue, kMinTime, kGrid, kTrajectory, kUnscented, kBench };

const char* ToString(QueryKind kind);

struct QueryConfig {
  QueryKind kind = QueryKind::kValue;
  std::optional<Vector> x0;
  std::optional<double> horizon;  ///< "T"
  double t_min = 0.0;
  std::optional<double> t_max;
  MinTimeOptions min_time;

  // grid
  std::optional<GridSpec> grid;
  std::vector<double> horizons;
  std::optional<double> t_star;
  int horizon_count = 10;

  // unscented / bench
  std::optional<Vector> mu;
  std::optional<Matrix> cov;
  int mc_samples = 100;
  std::uint64_t seed = 1;
  std::optional<double> mse_level;
  std::optional<double> robust_tau;
  std::vector<int> dims;
  int trials = 10;
};

struct ScenarioConfig {
  HopfProblem problem;
  SolverConfig solver;
  QueryConfig query;
};

/**
 * @brief Parses a JSON scenario.
 *
 * Sections: system {A, B, Q?}, control_set {kind: box|ball}, target
 * {radius | W, level?}, solver {tau, sigma?, theta?, epsilon?, max_iter?,
 * norm_safety?, quadrature_n?, quadrature_rule?}, query {kind, ...}.
 * Unknown keys and ragged arrays are rejected with ConfigError; the problem is
 * validated before returning.
 */
ScenarioConfig ParseScenario(const std::string& text);

/// Reads and parses a scenario file.
ScenarioConfig LoadScenario(const std::string& path);

struct RunOptions {
  std::string out_dir;  ///< empty: no files are written
  int workers = 0;      ///< 0: hardware concurrency
  bool emit_gnuplot = false;
};

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitNotConverged = 2,
  kExitNoBracket = 3,
};

/// Runs the query and prints a JSON record to `out`. Returns an ExitCode.
int RunScenario(const ScenarioConfig& config, const RunOptions& options,
                std::ostream& out, std::ostream& err);

// Building blocks of the unscented and scaling experiments, exposed for tests.

struct UnscentedReport {
  double nominal_t_star = 0.0;
  double robust_t_star = 0.0;
  int nominal_hits = 0;
  int robust_hits = 0;
  int samples = 0;
  bool converged = false;
};

/// Nominal vs unscented minimum-time controllers played from `samples`
/// initial states drawn from N(mu, cov) with a std::mt19937_64 seeded by
/// `seed`. A hit is a terminal state inside the problem's target.
UnscentedReport RunUnscentedExperiment(const HopfProblem& problem,
                                       const SolverConfig& nominal_solver,
                                       const SolverConfig& robust_solver,
                                       const Vector& mu, const Matrix& cov,
                                       double mse_level, double t_max,
                                       int samples, std::uint64_t seed,
                                       std::ostream* samples_csv = nullptr);

struct BenchRow {
  int dim = 0;
  double avg_ms = 0.0;
  double avg_iters = 0.0;
  int trials = 0;
  bool all_converged = true;
};

/// Augmented copies of `problem.system` with iid N(mu, cov) initial states and
/// W = k I blocks; averages the wall time of one Hopf solve at `horizon`.
std::vector<BenchRow> RunBenchmark(const HopfProblem& problem,
                                   const SolverConfig& solver,
                                   const std::vector<int>& dims, int trials,
                                   double horizon, const Vector& mu,
                                   const Matrix& cov, double mse_level,
                                   std::uint64_t seed);

/// Least-squares polynomial fit coefficients {c0, c1, c2} of y against x.
/// The degree drops to the number of distinct x minus one (at most 2).
std::vector<double> PolynomialFit(const std::vector<double>& x,
                                  const std::vector<double>& y);

}  // namespace hopf

#endif  // HOPF_SCENARIO_H_
