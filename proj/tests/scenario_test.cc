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


#include "hopf/scenario.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "hopf/time_optimal.h"
#include "json.hpp"
#include "oracles.h"

namespace hopf {
namespace {

using nlohmann::json;

json Base() {
  return json::parse(R"({
    "system": {"A": [[0, 1], [0, 0]], "B": [[0], [1]], "Q": [[1]]},
    "control_set": {"kind": "box"},
    "target": {"radius": 0.2},
    "solver": {"tau": 10, "epsilon": 1e-4, "theta": 1, "quadrature_n": 100},
    "query": {"kind": "value", "x0": [1, 0], "T": 1}
  })");
}

std::string ConfigErrorMessage(const json& doc) {
  try {
    ParseScenario(doc.dump());
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

struct Outcome {
  int code;
  json record;
  std::string err;
};

Outcome Execute(const json& doc, const std::string& out_dir = "") {
  const ScenarioConfig cfg = ParseScenario(doc.dump());
  RunOptions opt;
  opt.out_dir = out_dir;
  std::ostringstream out, err;
  const int code = RunScenario(cfg, opt, out, err);
  json rec;
  if (!out.str().empty()) rec = json::parse(out.str());
  return {code, rec, err.str()};
}

std::string TempDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hopf_scenario_" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

TEST(ParseScenarioTest, BundledConfigsParse) {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(HOPF_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(LoadScenario(entry.path().string())) << entry.path();
    ++seen;
  }
  EXPECT_GE(seen, 6);
}

TEST(ParseScenarioTest, Defaults) {
  json doc = Base();
  doc["solver"] = {{"tau", 2.0}};
  const ScenarioConfig cfg = ParseScenario(doc.dump());
  EXPECT_EQ(cfg.problem.quadrature_n, 100);
  EXPECT_EQ(cfg.solver.epsilon, 1e-4);
  EXPECT_EQ(cfg.solver.theta, 1.0);
  EXPECT_EQ(cfg.problem.quadrature_rule, QuadratureRule::kLeftRiemann);
  EXPECT_EQ(cfg.query.kind, QueryKind::kValue);
  EXPECT_LT((cfg.problem.target.w() - 0.04 * Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(ParseScenarioTest, ExplicitWAndLevel) {
  json doc = Base();
  doc["target"] = {{"W", {{2.0, 0.0}, {0.0, 3.0}}}, {"level", 0.5}};
  const ScenarioConfig cfg = ParseScenario(doc.dump());
  EXPECT_EQ(cfg.problem.target.w()(1, 1), 3.0);
  EXPECT_EQ(cfg.problem.target.level(), 0.5);
}

TEST(ParseScenarioTest, MissingKeyIsNamed) {
  json doc = Base();
  doc["system"].erase("B");
  EXPECT_NE(ConfigErrorMessage(doc).find("system.B"), std::string::npos);
}

TEST(ParseScenarioTest, UnknownKeyIsNamed) {
  json doc = Base();
  doc["query"]["foo"] = 1;
  EXPECT_NE(ConfigErrorMessage(doc).find("query.foo"), std::string::npos);
  doc = Base();
  doc["extra"] = {};
  EXPECT_NE(ConfigErrorMessage(doc).find("extra"), std::string::npos);
}

TEST(ParseScenarioTest, RaggedMatrixRejected) {
  json doc = Base();
  doc["system"]["A"] = {{0, 1}, {0}};
  EXPECT_FALSE(ConfigErrorMessage(doc).empty());
}

TEST(ParseScenarioTest, SyntaxErrorRejected) {
  EXPECT_THROW(ParseScenario("{\"system\": "), ConfigError);
}

TEST(ParseScenarioTest, ValidationFailuresAreConfigErrors) {
  json doc = Base();
  doc["system"]["B"] = {{0}, {1}, {2}};
  EXPECT_FALSE(ConfigErrorMessage(doc).empty());
  doc = Base();
  doc["target"] = {{"radius", 0.2}, {"center", {0.1, 0.0}}};
  EXPECT_FALSE(ConfigErrorMessage(doc).empty());
  doc = Base();
  doc["control_set"]["kind"] = "simplex";
  EXPECT_FALSE(ConfigErrorMessage(doc).empty());
  doc = Base();
  doc["solver"]["quadrature_rule"] = "simpson";
  EXPECT_FALSE(ConfigErrorMessage(doc).empty());
}

TEST(ParseScenarioTest, QueryRequirements) {
  json doc = Base();
  doc["query"].erase("T");
  EXPECT_FALSE(ConfigErrorMessage(doc).empty());
  doc = Base();
  doc["query"] = {{"kind", "min_time"}, {"x0", {1, 0}}};
  EXPECT_FALSE(ConfigErrorMessage(doc).empty());  // no t_max
  doc = Base();
  doc["query"] = {{"kind", "grid"},
                  {"bounds", {{-1, 1}, {-1, 1}}},
                  {"resolution", {1, 50}},
                  {"T", 1.0}};
  EXPECT_NE(ConfigErrorMessage(doc).find("resolution"), std::string::npos);
  doc = Base();
  doc["query"] = {{"kind", "bench"}, {"dims", {30, 31}}, {"mu", {1, 0}},
                  {"cov", {{0.01, 0}, {0, 0.01}}}, {"mse_level", 0.04}};
  EXPECT_FALSE(ConfigErrorMessage(doc).empty());
  doc = Base();
  doc["query"]["kind"] = "optimize";
  EXPECT_FALSE(ConfigErrorMessage(doc).empty());
}

TEST(LoadScenarioTest, MissingFile) {
  EXPECT_THROW(LoadScenario("/nonexistent/config.json"), ConfigError);
}

TEST(RunScenarioTest, ValueMatchesBruteForce) {
  const Outcome run = Execute(Base());
  ASSERT_EQ(run.code, kExitOk);
  EXPECT_TRUE(run.record["converged"].get<bool>());
  const double phi = run.record["phi"].get<double>();
  const ScenarioConfig cfg = ParseScenario(Base().dump());
  Vector x0(2);
  x0 << 1.0, 0.0;
  const double oracle = oracle::BruteHopf(cfg.problem, x0, 1.0).MinimizeValue2D();
  EXPECT_NEAR(phi, oracle, 1e-4 * (1.0 + std::abs(oracle)));
}

TEST(RunScenarioTest, ValueInsideTargetIsNegative) {
  json doc = Base();
  doc["query"]["x0"] = {0, 0};
  doc["query"]["T"] = 0.05;
  const Outcome run = Execute(doc);
  ASSERT_EQ(run.code, kExitOk);
  EXPECT_LT(run.record["phi"].get<double>(), 0.0);
}

TEST(RunScenarioTest, ValueNotConvergedExitsTwo) {
  json doc = Base();
  doc["solver"]["max_iter"] = 5;
  const Outcome run = Execute(doc);
  EXPECT_EQ(run.code, kExitNotConverged);
  EXPECT_FALSE(run.record["converged"].get<bool>());
  EXPECT_TRUE(run.record.contains("phi"));
}

TEST(RunScenarioTest, MinTimeMatchesLibrary) {
  json doc = Base();
  doc["query"] = {{"kind", "min_time"}, {"x0", {1, 0}}, {"t_max", 5}};
  const std::string dir = TempDir("min_time");
  const Outcome run = Execute(doc, dir);
  ASSERT_EQ(run.code, kExitOk);
  const ScenarioConfig cfg = ParseScenario(doc.dump());
  Vector x0(2);
  x0 << 1.0, 0.0;
  const MinTimeResult r = MinTime(x0, 0.0, 5.0, cfg.problem, cfg.solver);
  EXPECT_EQ(run.record["t_star"].get<double>(), r.t_star);
  EXPECT_LE(std::abs(run.record["phi_at_t_star"].get<double>()), 1e-4);
  EXPECT_TRUE(std::filesystem::exists(dir + "/trajectory.csv"));
}

TEST(RunScenarioTest, MinTimeInsideTargetIsZero) {
  json doc = Base();
  doc["query"] = {{"kind", "min_time"}, {"x0", {0.05, 0}}, {"t_max", 5}};
  const Outcome run = Execute(doc);
  ASSERT_EQ(run.code, kExitOk);
  EXPECT_EQ(run.record["t_star"].get<double>(), 0.0);
}

TEST(RunScenarioTest, MinTimeShortHorizonExitsThree) {
  json doc = Base();
  doc["query"] = {{"kind", "min_time"}, {"x0", {1, 0}}, {"t_max", 0.5}};
  const Outcome run = Execute(doc);
  EXPECT_EQ(run.code, kExitNoBracket);
  EXPECT_EQ(run.record["error"].get<std::string>(), ToString(ErrorCode::kNoSignChange));
}

TEST(RunScenarioTest, TrajectoryAtFixedHorizon) {
  json doc = Base();
  doc["query"] = {{"kind", "trajectory"}, {"x0", {1, 0}}, {"T", 2.0}};
  const std::string dir = TempDir("trajectory");
  const Outcome run = Execute(doc, dir);
  ASSERT_EQ(run.code, kExitOk);
  std::ifstream is(dir + "/trajectory.csv");
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "t,z_1,z_2,x_1,x_2,u_1");
}

TEST(RunScenarioTest, GridWritesOneFilePairPerHorizon) {
  json doc = Base();
  doc["solver"]["tau"] = 5;
  doc["query"] = {{"kind", "grid"},
                  {"bounds", {{-1, 1}, {-1, 1}}},
                  {"resolution", {12, 12}},
                  {"t_star", 1.72},
                  {"horizon_count", 10}};
  const std::string dir = TempDir("grid");
  const Outcome run = Execute(doc, dir);
  ASSERT_EQ(run.code, kExitOk);
  EXPECT_TRUE(run.record["all_converged"].get<bool>());
  EXPECT_EQ(run.record["horizons"].size(), 10u);
  int fields = 0, contours = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("field_", 0) == 0 && entry.path().extension() == ".csv") ++fields;
    if (name.rfind("contour_", 0) == 0 && entry.path().extension() == ".csv") ++contours;
  }
  EXPECT_EQ(fields, 10);
  EXPECT_EQ(contours, 10);
}

TEST(UnscentedExperimentTest, DeterministicForSeed) {
  const ScenarioConfig cfg =
      LoadScenario(std::string(HOPF_CONFIG_DIR) + "/double_integrator_unscented.json");
  const QueryConfig& q = cfg.query;
  SolverConfig robust = cfg.solver;
  robust.tau = *q.robust_tau;
  const UnscentedReport a = RunUnscentedExperiment(cfg.problem, cfg.solver, robust, *q.mu,
                                                   *q.cov, *q.mse_level, *q.t_max, 40, 5);
  const UnscentedReport b = RunUnscentedExperiment(cfg.problem, cfg.solver, robust, *q.mu,
                                                   *q.cov, *q.mse_level, *q.t_max, 40, 5);
  EXPECT_EQ(a.nominal_hits, b.nominal_hits);
  EXPECT_EQ(a.robust_hits, b.robust_hits);
  EXPECT_EQ(a.samples, 40);
}

TEST(UnscentedExperimentTest, VanishingUncertainty) {
  // Minimum-time controls end on the target boundary, so with (almost) no
  // spread every sample shares one terminal state with J ~ 0: the outcome is
  // all-or-nothing and the terminal cost sits at the boundary.
  const ScenarioConfig cfg =
      LoadScenario(std::string(HOPF_CONFIG_DIR) + "/double_integrator_unscented.json");
  const QueryConfig& q = cfg.query;
  SolverConfig robust = cfg.solver;
  robust.tau = *q.robust_tau;
  const Matrix tiny = 1e-12 * Matrix::Identity(2, 2);
  std::stringstream csv;
  const UnscentedReport r = RunUnscentedExperiment(
      cfg.problem, cfg.solver, robust, *q.mu, tiny, *q.mse_level, *q.t_max, 100, 9, &csv);
  EXPECT_TRUE(r.nominal_hits == 0 || r.nominal_hits == 100) << r.nominal_hits;
  EXPECT_TRUE(r.robust_hits == 0 || r.robust_hits == 100) << r.robust_hits;

  // Terminal rows: the last row of each (controller, sample) run.
  std::string line, last, key;
  int terminals = 0;
  auto check = [&](const std::string& row) {
    std::stringstream ss(row);
    std::string cell;
    std::vector<double> cols;
    std::getline(ss, cell, ',');  // controller
    while (std::getline(ss, cell, ',')) cols.push_back(std::stod(cell));
    Vector x(2);
    x << cols[2], cols[3];
    EXPECT_LE(std::abs(TerminalCostX(cfg.problem.target, x)), 1e-3);
    ++terminals;
  };
  std::getline(csv, line);  // seed comment
  std::getline(csv, line);  // header
  while (std::getline(csv, line)) {
    const std::string row_key = line.substr(0, line.find(',', line.find(',') + 1));
    if (!last.empty() && row_key != key) check(last);
    key = row_key;
    last = line;
  }
  if (!last.empty()) check(last);
  EXPECT_EQ(terminals, 200);
}

TEST(PolynomialFitTest, RecoversQuadratic) {
  const std::vector<double> x = {30, 60, 90, 120};
  std::vector<double> y;
  for (double d : x) y.push_back(2.598 + 0.0414 * d + 2.382e-4 * d * d);
  const std::vector<double> c = PolynomialFit(x, y);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_NEAR(c[0], 2.598, 1e-9);
  EXPECT_NEAR(c[1], 0.0414, 1e-11);
  EXPECT_NEAR(c[2], 2.382e-4, 1e-13);
}

TEST(PolynomialFitTest, DegeneratesWithFewPoints) {
  EXPECT_EQ(PolynomialFit({30}, {4.0}).size(), 1u);
  EXPECT_EQ(PolynomialFit({30, 30}, {4.0, 6.0}).size(), 1u);
  EXPECT_NEAR(PolynomialFit({30, 30}, {4.0, 6.0})[0], 5.0, 1e-12);
  EXPECT_EQ(PolynomialFit({30, 60}, {4.0, 6.0}).size(), 2u);
  EXPECT_THROW(PolynomialFit({1, 2}, {1}), HopfError);
}

TEST(BenchTest, SingleDimensionReportsOnlyIntercept) {
  json doc = Base();
  doc["solver"]["tau"] = 0.01;
  doc["query"] = {{"kind", "bench"}, {"dims", {10}}, {"trials", 2}, {"T", 1},
                  {"mu", {1, 0}}, {"cov", {{0.0044, 0}, {0, 0.0044}}},
                  {"mse_level", 0.04}, {"seed", 3}};
  const Outcome run = Execute(doc);
  ASSERT_EQ(run.code, kExitOk);
  EXPECT_TRUE(run.record["fit"].contains("c0"));
  EXPECT_FALSE(run.record["fit"].contains("c1"));
  EXPECT_FALSE(run.record["fit"].contains("c2"));
}

TEST(BenchTest, IterationCountsRepeat) {
  const ScenarioConfig cfg =
      LoadScenario(std::string(HOPF_CONFIG_DIR) + "/double_integrator_bench.json");
  const QueryConfig& q = cfg.query;
  const std::vector<int> dims = {10, 20};
  const auto a = RunBenchmark(cfg.problem, cfg.solver, dims, 3, 1.0, *q.mu, *q.cov,
                              *q.mse_level, 17);
  const auto b = RunBenchmark(cfg.problem, cfg.solver, dims, 3, 1.0, *q.mu, *q.cov,
                              *q.mse_level, 17);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].dim, dims[i]);
    EXPECT_EQ(a[i].avg_iters, b[i].avg_iters);
    EXPECT_EQ(a[i].trials, 3);
  }
}

}  // namespace
}  // namespace hopf
