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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include "json.hpp"

#include "hopf/csv.h"
#include "hopf/trajectory.h"
#include "hopf/unscented.h"

namespace hopf {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double MillisecondsSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

[[noreturn]] void Fail(const std::string& message) { throw ConfigError(message); }

std::string Join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void CheckKeys(const json& obj, const std::string& path,
               std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) Fail("'" + path + "' must be an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) Fail("unknown key '" + Join(path, item.key()) + "'");
  }
}

const json& Require(const json& obj, const std::string& path,
                    const char* key) {
  if (!obj.contains(key)) Fail("missing key '" + Join(path, key) + "'");
  return obj.at(key);
}

double ReadNumber(const json& value, const std::string& path) {
  if (!value.is_number()) Fail("'" + path + "' must be a number");
  const double out = value.get<double>();
  if (!std::isfinite(out)) Fail("'" + path + "' must be finite");
  return out;
}

int ReadInt(const json& value, const std::string& path) {
  if (!value.is_number_integer()) Fail("'" + path + "' must be an integer");
  return value.get<int>();
}

Vector ReadVector(const json& value, const std::string& path) {
  if (!value.is_array()) Fail("'" + path + "' must be an array of numbers");
  Vector out(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) =
        ReadNumber(value[i], path + "[" + std::to_string(i) + "]");
  }
  return out;
}

Matrix ReadMatrix(const json& value, const std::string& path) {
  if (!value.is_array() || value.empty()) {
    Fail("'" + path + "' must be a non-empty array of rows");
  }
  const std::size_t rows = value.size();
  if (!value[0].is_array()) Fail("'" + path + "' must be an array of rows");
  const std::size_t cols = value[0].size();
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    if (!value[i].is_array() || value[i].size() != cols) {
      Fail("'" + path + "' is not rectangular at row " + std::to_string(i));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          ReadNumber(value[i][j], row_path + "[" + std::to_string(j) + "]");
    }
  }
  return out;
}

QueryKind ParseKind(const json& value) {
  if (!value.is_string()) Fail("'query.kind' must be a string");
  const std::string kind = value.get<std::string>();
  if (kind == "value") return QueryKind::kValue;
  if (kind == "min_time") return QueryKind::kMinTime;
  if (kind == "grid") return QueryKind::kGrid;
  if (kind == "trajectory") return QueryKind::kTrajectory;
  if (kind == "unscented") return QueryKind::kUnscented;
  if (kind == "bench") return QueryKind::kBench;
  Fail("'query.kind' has unknown value '" + kind + "'");
}

LinearSystem ParseSystem(const json& obj) {
  CheckKeys(obj, "system", {"A", "B", "Q"});
  LinearSystem system;
  system.a = ReadMatrix(Require(obj, "system", "A"), "system.A");
  system.b = ReadMatrix(Require(obj, "system", "B"), "system.B");
  system.q = obj.contains("Q") ? ReadMatrix(obj.at("Q"), "system.Q")
                               : Matrix::Identity(system.m(), system.m());
  return system;
}

ControlSet ParseControlSet(const json& obj, Eigen::Index m) {
  CheckKeys(obj, "control_set", {"kind"});
  const json& kind = Require(obj, "control_set", "kind");
  if (kind == "box") return ControlSet::Box(m);
  if (kind == "ball") return ControlSet::Ball(m);
  Fail("'control_set.kind' must be \"box\" or \"ball\"");
}

QuadraticTarget ParseTarget(const json& obj, Eigen::Index n) {
  CheckKeys(obj, "target", {"radius", "W", "level", "center"});
  if (obj.contains("radius") == obj.contains("W")) {
    Fail("'target' needs exactly one of 'radius' or 'W'");
  }
  std::optional<Vector> center;
  if (obj.contains("center")) {
    center = ReadVector(obj.at("center"), "target.center");
  }
  if (obj.contains("radius")) {
    if (obj.contains("level")) Fail("'target.level' is fixed when 'radius' is set");
    const double r = ReadNumber(obj.at("radius"), "target.radius");
    if (!(r > 0.0)) Fail("'target.radius' must be positive");
    return QuadraticTarget(Matrix::Identity(n, n) * (r * r), 1.0, center);
  }
  const double level =
      obj.contains("level") ? ReadNumber(obj.at("level"), "target.level") : 1.0;
  return QuadraticTarget(ReadMatrix(obj.at("W"), "target.W"), level, center);
}

void ParseSolver(const json& obj, HopfProblem& problem, SolverConfig& solver) {
  CheckKeys(obj, "solver",
            {"tau", "sigma", "theta", "epsilon", "max_iter", "norm_safety",
             "quadrature_n", "quadrature_rule"});
  if (obj.contains("tau")) solver.tau = ReadNumber(obj.at("tau"), "solver.tau");
  if (obj.contains("sigma")) {
    solver.sigma = ReadNumber(obj.at("sigma"), "solver.sigma");
  }
  if (obj.contains("theta")) {
    solver.theta = ReadNumber(obj.at("theta"), "solver.theta");
  }
  if (obj.contains("epsilon")) {
    solver.epsilon = ReadNumber(obj.at("epsilon"), "solver.epsilon");
  }
  if (obj.contains("max_iter")) {
    solver.max_iter = ReadInt(obj.at("max_iter"), "solver.max_iter");
  }
  if (obj.contains("norm_safety")) {
    solver.norm_safety = ReadNumber(obj.at("norm_safety"), "solver.norm_safety");
  }
  if (obj.contains("quadrature_n")) {
    problem.quadrature_n = ReadInt(obj.at("quadrature_n"), "solver.quadrature_n");
  }
  if (obj.contains("quadrature_rule")) {
    const json& rule = obj.at("quadrature_rule");
    if (rule == "left_riemann") {
      problem.quadrature_rule = QuadratureRule::kLeftRiemann;
    } else if (rule == "trapezoid") {
      problem.quadrature_rule = QuadratureRule::kTrapezoid;
    } else {
      Fail("'solver.quadrature_rule' must be \"left_riemann\" or \"trapezoid\"");
    }
  }
}

GridSpec ParseGrid(const json& obj, Eigen::Index n) {
  GridSpec grid;
  const json& bounds = Require(obj, "query", "bounds");
  const Matrix b = ReadMatrix(bounds, "query.bounds");
  if (b.cols() != 2 || b.rows() != n) {
    Fail("'query.bounds' must list one [lo, hi] pair per state axis");
  }
  for (Eigen::Index a = 0; a < n; ++a) {
    if (!(b(a, 1) > b(a, 0))) Fail("'query.bounds' needs lo < hi on every axis");
    grid.lo.push_back(b(a, 0));
    grid.hi.push_back(b(a, 1));
  }
  const json& res = Require(obj, "query", "resolution");
  if (res.is_array()) {
    if (res.size() != static_cast<std::size_t>(n)) {
      Fail("'query.resolution' must have one entry per state axis");
    }
    for (std::size_t a = 0; a < res.size(); ++a) {
      grid.resolution.push_back(
          ReadInt(res[a], "query.resolution[" + std::to_string(a) + "]"));
    }
  } else {
    grid.resolution.assign(n, ReadInt(res, "query.resolution"));
  }
  for (int r : grid.resolution) {
    if (r < 2) Fail("'query.resolution' must be at least 2 on every axis");
  }
  return grid;
}

QueryConfig ParseQuery(const json& obj, Eigen::Index n) {
  CheckKeys(obj, "query",
            {"kind", "x0", "T", "t_min", "t_max", "value_tol", "time_tol",
             "max_outer_iter", "bounds", "resolution", "horizons", "t_star",
             "horizon_count", "mu", "cov", "mc_samples", "seed", "mse_level",
             "robust_tau", "dims", "trials"});
  QueryConfig q;
  q.kind = ParseKind(Require(obj, "query", "kind"));

  auto state = [&](const char* key) -> std::optional<Vector> {
    if (!obj.contains(key)) return std::nullopt;
    Vector v = ReadVector(obj.at(key), Join("query", key));
    if (v.size() != n) Fail("'query." + std::string(key) + "' has wrong length");
    return v;
  };
  auto number = [&](const char* key) -> std::optional<double> {
    if (!obj.contains(key)) return std::nullopt;
    return ReadNumber(obj.at(key), Join("query", key));
  };
  auto integer = [&](const char* key, int fallback) {
    return obj.contains(key) ? ReadInt(obj.at(key), Join("query", key)) : fallback;
  };

  q.x0 = state("x0");
  q.mu = state("mu");
  q.horizon = number("T");
  q.t_min = number("t_min").value_or(0.0);
  q.t_max = number("t_max");
  q.t_star = number("t_star");
  q.mse_level = number("mse_level");
  q.robust_tau = number("robust_tau");
  q.min_time.value_tol = number("value_tol").value_or(q.min_time.value_tol);
  q.min_time.time_tol = number("time_tol").value_or(q.min_time.time_tol);
  q.min_time.max_outer_iter = integer("max_outer_iter", q.min_time.max_outer_iter);
  q.horizon_count = integer("horizon_count", q.horizon_count);
  q.mc_samples = integer("mc_samples", q.mc_samples);
  q.trials = integer("trials", q.trials);
  if (obj.contains("seed")) {
    if (!obj.at("seed").is_number_unsigned()) {
      Fail("'query.seed' must be a non-negative integer");
    }
    q.seed = obj.at("seed").get<std::uint64_t>();
  }
  if (obj.contains("cov")) {
    q.cov = ReadMatrix(obj.at("cov"), "query.cov");
    if (q.cov->rows() != n || q.cov->cols() != n) {
      Fail("'query.cov' must be n x n");
    }
  }
  if (obj.contains("horizons")) {
    const Vector h = ReadVector(obj.at("horizons"), "query.horizons");
    q.horizons.assign(h.data(), h.data() + h.size());
  }
  if (obj.contains("dims")) {
    const json& dims = obj.at("dims");
    if (!dims.is_array()) Fail("'query.dims' must be an array of integers");
    for (std::size_t i = 0; i < dims.size(); ++i) {
      q.dims.push_back(ReadInt(dims[i], "query.dims[" + std::to_string(i) + "]"));
    }
  }
  if (obj.contains("bounds") || obj.contains("resolution")) {
    q.grid = ParseGrid(obj, n);
  }
  return q;
}

void RequireField(bool present, const char* key, QueryKind kind) {
  if (!present) {
    Fail("missing key 'query." + std::string(key) + "' for kind '" +
         ToString(kind) + "'");
  }
}

void CheckQuery(const QueryConfig& q, Eigen::Index n) {
  switch (q.kind) {
    case QueryKind::kValue:
      RequireField(q.x0.has_value(), "x0", q.kind);
      RequireField(q.horizon.has_value(), "T", q.kind);
      break;
    case QueryKind::kMinTime:
      RequireField(q.x0.has_value(), "x0", q.kind);
      RequireField(q.t_max.has_value(), "t_max", q.kind);
      break;
    case QueryKind::kTrajectory:
      RequireField(q.x0.has_value(), "x0", q.kind);
      RequireField(q.horizon.has_value() || q.t_max.has_value(), "t_max",
                   q.kind);
      break;
    case QueryKind::kGrid:
      RequireField(q.grid.has_value(), "bounds", q.kind);
      if (q.horizons.empty() && !q.horizon && !q.t_star &&
          !(q.x0 && q.t_max)) {
        Fail("grid query needs 'horizons', 'T', 't_star', or 'x0' with 't_max'");
      }
      if (q.horizon_count < 1) Fail("'query.horizon_count' must be positive");
      break;
    case QueryKind::kUnscented:
      RequireField(q.mu.has_value(), "mu", q.kind);
      RequireField(q.cov.has_value(), "cov", q.kind);
      RequireField(q.mse_level.has_value(), "mse_level", q.kind);
      RequireField(q.t_max.has_value(), "t_max", q.kind);
      if (q.mc_samples < 1) Fail("'query.mc_samples' must be positive");
      break;
    case QueryKind::kBench:
      RequireField(!q.dims.empty(), "dims", q.kind);
      RequireField(q.mu.has_value(), "mu", q.kind);
      RequireField(q.cov.has_value(), "cov", q.kind);
      RequireField(q.mse_level.has_value(), "mse_level", q.kind);
      if (q.trials < 1) Fail("'query.trials' must be positive");
      for (int d : q.dims) {
        if (d < n || d % n != 0) {
          Fail("'query.dims' entries must be positive multiples of the state "
               "dimension");
        }
      }
      break;
  }
}

// ---------------------------------------------------------------- output

json ToJson(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

void EnsureDirectory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir + "': " + ec.message());
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  return os;
}

std::string PathIn(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void WriteTrajectoryGnuplot(std::ostream& os, const Trajectory& traj) {
  os << "# t x_1..x_n u_1..u_m\n";
  for (std::size_t j = 0; j < traj.size(); ++j) {
    os << FormatNumber(traj.times[j]);
    for (Eigen::Index i = 0; i < traj.x_states[j].size(); ++i) {
      os << ' ' << FormatNumber(traj.x_states[j](i));
    }
    for (Eigen::Index i = 0; i < traj.controls[j].size(); ++i) {
      os << ' ' << FormatNumber(traj.controls[j](i));
    }
    os << '\n';
  }
}

void WriteContourGnuplot(std::ostream& os,
                         const std::vector<Polyline>& contours) {
  os << "# x_1 x_2, blank line between polylines\n";
  for (const Polyline& line : contours) {
    for (const Point2& p : line) {
      os << FormatNumber(p.x) << ' ' << FormatNumber(p.y) << '\n';
    }
    os << '\n';
  }
}

std::string HorizonTag(std::size_t index) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%02zu", index);
  return buf;
}

MinTimeResult RunMinTimeOrThrow(const Vector& x0, const QueryConfig& q,
                                const HopfProblem& problem,
                                const SolverConfig& solver) {
  return MinTime(x0, q.t_min, *q.t_max, problem, solver, q.min_time);
}

int ReportNoBracket(const HopfError& e, std::ostream& out) {
  json rec;
  rec["error"] = ToString(e.code());
  rec["message"] = e.what();
  out << rec.dump() << '\n';
  return kExitNoBracket;
}

// ---------------------------------------------------------------- commands

int CmdValue(const ScenarioConfig& cfg, std::ostream& out) {
  const auto start = Clock::now();
  const HopfSolution s =
      SolveHopf(*cfg.query.x0, *cfg.query.horizon, cfg.problem, cfg.solver);
  const double ms = MillisecondsSince(start);
  json rec;
  rec["kind"] = "value";
  rec["T"] = *cfg.query.horizon;
  rec["phi"] = s.value;
  rec["p_star"] = ToJson(s.minimizer);
  rec["iterations"] = s.iterations;
  rec["primal_residual"] = s.primal_residual;
  rec["dual_residual"] = s.dual_residual;
  rec["converged"] = s.converged;
  rec["solve_ms"] = ms;
  out << rec.dump() << '\n';
  return s.converged ? kExitOk : kExitNotConverged;
}

int CmdMinTime(const ScenarioConfig& cfg, const RunOptions& opt,
               std::ostream& out) {
  const QueryConfig& q = cfg.query;
  json rec;
  rec["kind"] = ToString(q.kind);
  HopfSolution solution;
  double horizon = 0.0;
  bool converged = true;
  const auto start = Clock::now();
  if (q.kind == QueryKind::kTrajectory && q.horizon) {
    const HopfSolution s = SolveHopf(*q.x0, *q.horizon, cfg.problem, cfg.solver);
    rec["solve_ms"] = MillisecondsSince(start);
    horizon = *q.horizon;
    solution = s;
    converged = s.converged;
    rec["T"] = horizon;
    rec["phi"] = s.value;
    rec["iterations"] = s.iterations;
  } else {
    MinTimeResult r;
    try {
      r = RunMinTimeOrThrow(*q.x0, q, cfg.problem, cfg.solver);
    } catch (const HopfError& e) {
      if (e.code() == ErrorCode::kNoSignChange) return ReportNoBracket(e, out);
      throw;
    }
    rec["solve_ms"] = MillisecondsSince(start);
    horizon = r.t_star;
    solution = r.solution;
    converged = r.solution.converged;
    rec["t_star"] = r.t_star;
    rec["phi_at_t_star"] = r.solution.value;
    rec["newton_steps"] = r.newton_steps;
    rec["bisection_steps"] = r.bisection_steps;
    rec["iterations"] = r.solution.iterations;
  }
  rec["converged"] = converged;

  const bool want_traj = q.kind == QueryKind::kTrajectory || !opt.out_dir.empty();
  if (want_traj && horizon > 0.0) {
    const Trajectory traj = Reconstruct(solution, horizon, cfg.problem);
    rec["terminal_x"] = ToJson(traj.x_states.back());
    rec["terminal_cost"] = TerminalCostX(cfg.problem.target, traj.x_states.back());
    if (!opt.out_dir.empty()) {
      EnsureDirectory(opt.out_dir);
      const std::string path = PathIn(opt.out_dir, "trajectory.csv");
      std::ofstream os = OpenOutput(path);
      WriteTrajectoryCsv(os, traj);
      rec["trajectory_csv"] = path;
      if (opt.emit_gnuplot) {
        std::ofstream dat = OpenOutput(PathIn(opt.out_dir, "trajectory.dat"));
        WriteTrajectoryGnuplot(dat, traj);
      }
    }
  }
  out << rec.dump() << '\n';
  return converged ? kExitOk : kExitNotConverged;
}

int CmdGrid(const ScenarioConfig& cfg, const RunOptions& opt,
            std::ostream& out) {
  const QueryConfig& q = cfg.query;
  json rec;
  rec["kind"] = "grid";
  std::vector<double> horizons = q.horizons;
  if (horizons.empty() && q.horizon) horizons.push_back(*q.horizon);
  if (horizons.empty()) {
    double t_star = 0.0;
    if (q.t_star) {
      t_star = *q.t_star;
    } else {
      try {
        t_star = RunMinTimeOrThrow(*q.x0, q, cfg.problem, cfg.solver).t_star;
      } catch (const HopfError& e) {
        if (e.code() == ErrorCode::kNoSignChange) return ReportNoBracket(e, out);
        throw;
      }
    }
    if (!(t_star > 0.0)) Fail("grid horizons need a positive t_star");
    rec["t_star"] = t_star;
    for (int k = 1; k <= q.horizon_count; ++k) {
      horizons.push_back(t_star * k / q.horizon_count);
    }
  }

  const bool two_d = cfg.problem.system.n() == 2;
  if (!opt.out_dir.empty()) EnsureDirectory(opt.out_dir);
  bool all_converged = true;
  double total_ms = 0.0;
  std::size_t points = 0;
  json files = json::array();
  json summaries = json::array();
  const auto start = Clock::now();
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    const ValueField field =
        SolveGrid(cfg.problem, horizons[h], *q.grid, cfg.solver, opt.workers);
    all_converged = all_converged && field.AllConverged();
    for (double ms : field.solve_ms) total_ms += ms;
    points += field.size();
    json summary;
    summary["T"] = horizons[h];
    summary["all_converged"] = field.AllConverged();
    summary["mean_iterations"] = field.MeanIterations();
    summary["mean_solve_ms"] = field.MeanSolveMs();
    std::vector<Polyline> contours;
    if (two_d) {
      contours = ZeroContour(field);
      summary["polylines"] = contours.size();
    }
    summaries.push_back(summary);
    if (opt.out_dir.empty()) continue;
    const std::string tag = HorizonTag(h);
    const std::string field_path = PathIn(opt.out_dir, "field_" + tag + ".csv");
    std::ofstream fos = OpenOutput(field_path);
    WriteFieldCsv(fos, field);
    files.push_back(field_path);
    if (two_d) {
      const std::string contour_path =
          PathIn(opt.out_dir, "contour_" + tag + ".csv");
      std::ofstream cos = OpenOutput(contour_path);
      WriteContourCsv(cos, contours, horizons[h]);
      files.push_back(contour_path);
      if (opt.emit_gnuplot) {
        std::ofstream dat =
            OpenOutput(PathIn(opt.out_dir, "contour_" + tag + ".dat"));
        WriteContourGnuplot(dat, contours);
      }
    }
  }
  rec["sweep_ms"] = MillisecondsSince(start);
  rec["horizons"] = summaries;
  rec["all_converged"] = all_converged;
  rec["mean_solve_ms"] = points ? total_ms / static_cast<double>(points) : 0.0;
  rec["files"] = files;
  out << rec.dump() << '\n';
  return all_converged ? kExitOk : kExitNotConverged;
}

int CmdUnscented(const ScenarioConfig& cfg, const RunOptions& opt,
                 std::ostream& out) {
  const QueryConfig& q = cfg.query;
  SolverConfig robust = cfg.solver;
  if (q.robust_tau) robust.tau = *q.robust_tau;
  std::ofstream samples_os;
  std::string samples_path;
  if (!opt.out_dir.empty()) {
    EnsureDirectory(opt.out_dir);
    samples_path = PathIn(opt.out_dir, "unscented_samples.csv");
    samples_os = OpenOutput(samples_path);
  }
  UnscentedReport report;
  try {
    report = RunUnscentedExperiment(
        cfg.problem, cfg.solver, robust, *q.mu, *q.cov, *q.mse_level, *q.t_max,
        q.mc_samples, q.seed, samples_os.is_open() ? &samples_os : nullptr);
  } catch (const HopfError& e) {
    if (e.code() == ErrorCode::kNoSignChange) return ReportNoBracket(e, out);
    throw;
  }
  json rec;
  rec["kind"] = "unscented";
  rec["seed"] = q.seed;
  rec["mc_samples"] = report.samples;
  rec["nominal_t_star"] = report.nominal_t_star;
  rec["robust_t_star"] = report.robust_t_star;
  rec["nominal_hits"] = report.nominal_hits;
  rec["robust_hits"] = report.robust_hits;
  rec["converged"] = report.converged;
  if (!samples_path.empty()) rec["samples_csv"] = samples_path;
  out << rec.dump() << '\n';
  return report.converged ? kExitOk : kExitNotConverged;
}

int CmdBench(const ScenarioConfig& cfg, const RunOptions& opt,
             std::ostream& out) {
  const QueryConfig& q = cfg.query;
  const double horizon = q.horizon.value_or(1.0);
  const std::vector<BenchRow> rows =
      RunBenchmark(cfg.problem, cfg.solver, q.dims, q.trials, horizon, *q.mu,
                   *q.cov, *q.mse_level, q.seed);
  std::vector<double> x, y;
  bool converged = true;
  json table = json::array();
  for (const BenchRow& r : rows) {
    x.push_back(r.dim);
    y.push_back(r.avg_ms);
    converged = converged && r.all_converged;
    table.push_back({{"dim", r.dim},
                     {"avg_ms", r.avg_ms},
                     {"avg_iters", r.avg_iters},
                     {"trials", r.trials}});
  }
  const std::vector<double> fit = PolynomialFit(x, y);
  json rec;
  rec["kind"] = "bench";
  rec["seed"] = q.seed;
  rec["T"] = horizon;
  rec["rows"] = table;
  json coeffs;
  const char* names[] = {"c0", "c1", "c2"};
  for (std::size_t i = 0; i < fit.size(); ++i) coeffs[names[i]] = fit[i];
  rec["fit"] = coeffs;
  rec["converged"] = converged;
  if (!opt.out_dir.empty()) {
    EnsureDirectory(opt.out_dir);
    const std::string path = PathIn(opt.out_dir, "bench.csv");
    std::ofstream os = OpenOutput(path);
    os << "# seed=" << q.seed << " T=" << FormatNumber(horizon) << '\n';
    os << "dim,avg_ms,avg_iters,trials\n";
    for (const BenchRow& r : rows) {
      os << r.dim << ',' << FormatNumber(r.avg_ms) << ','
         << FormatNumber(r.avg_iters) << ',' << r.trials << '\n';
    }
    rec["bench_csv"] = path;
    if (opt.emit_gnuplot) {
      std::ofstream dat = OpenOutput(PathIn(opt.out_dir, "bench.dat"));
      dat << "# dim avg_ms avg_iters\n";
      for (const BenchRow& r : rows) {
        dat << r.dim << ' ' << FormatNumber(r.avg_ms) << ' '
            << FormatNumber(r.avg_iters) << '\n';
      }
    }
  }
  out << rec.dump() << '\n';
  return converged ? kExitOk : kExitNotConverged;
}

Matrix CholeskyFactor(const Matrix& cov) {
  const Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw HopfError(ErrorCode::kNotPositiveDefinite,
                    "covariance is not positive definite");
  }
  return llt.matrixL();
}

Vector Draw(const Vector& mu, const Matrix& factor, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector xi(mu.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = normal(rng);
  return mu + factor * xi;
}

}  // namespace

const char* ToString(QueryKind kind) {
  switch (kind) {
    case QueryKind::kValue: return "value";
    case QueryKind::kMinTime: return "min_time";
    case QueryKind::kGrid: return "grid";
    case QueryKind::kTrajectory: return "trajectory";
    case QueryKind::kUnscented: return "unscented";
    case QueryKind::kBench: return "bench";
  }
  return "unknown";
}

ScenarioConfig ParseScenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
  CheckKeys(doc, "", {"system", "control_set", "target", "solver", "query"});
  ScenarioConfig cfg;
  cfg.problem.system = ParseSystem(Require(doc, "", "system"));
  cfg.problem.control_set =
      ParseControlSet(Require(doc, "", "control_set"), cfg.problem.system.m());
  cfg.problem.target =
      ParseTarget(Require(doc, "", "target"), cfg.problem.system.n());
  if (doc.contains("solver")) {
    ParseSolver(doc.at("solver"), cfg.problem, cfg.solver);
  }
  const std::vector<Violation> violations = Validate(cfg.problem);
  if (!violations.empty()) {
    std::string message = "invalid problem:";
    for (const Violation& v : violations) {
      message += std::string(" [") + ToString(v.code) + "] " + v.message + ";";
    }
    Fail(message);
  }
  try {
    CheckValid(cfg.solver);
  } catch (const HopfError& e) {
    Fail(std::string("invalid solver: ") + e.what());
  }
  cfg.query = ParseQuery(Require(doc, "", "query"), cfg.problem.system.n());
  CheckQuery(cfg.query, cfg.problem.system.n());
  return cfg;
}

ScenarioConfig LoadScenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << is.rdbuf();
  try {
    return ParseScenario(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

int RunScenario(const ScenarioConfig& config, const RunOptions& options,
                std::ostream& out, std::ostream& err) {
  try {
    CheckQuery(config.query, config.problem.system.n());
    switch (config.query.kind) {
      case QueryKind::kValue: return CmdValue(config, out);
      case QueryKind::kMinTime:
      case QueryKind::kTrajectory: return CmdMinTime(config, options, out);
      case QueryKind::kGrid: return CmdGrid(config, options, out);
      case QueryKind::kUnscented: return CmdUnscented(config, options, out);
      case QueryKind::kBench: return CmdBench(config, options, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const HopfError& e) {
    err << "error [" << ToString(e.code()) << "]: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::kNoSignChange: return kExitNoBracket;
      case ErrorCode::kMaxOuterIter: return kExitNotConverged;
      default: return kExitConfigError;
    }
  }
  return kExitConfigError;
}

UnscentedReport RunUnscentedExperiment(const HopfProblem& problem,
                                       const SolverConfig& nominal_solver,
                                       const SolverConfig& robust_solver,
                                       const Vector& mu, const Matrix& cov,
                                       double mse_level, double t_max,
                                       int samples, std::uint64_t seed,
                                       std::ostream* samples_csv) {
  const MinTimeResult nominal = MinTime(mu, 0.0, t_max, problem, nominal_solver);

  const SigmaSet sigma = SigmaPoints(mu, cov);
  const int copies = static_cast<int>(sigma.points.size());
  HopfProblem robust_problem = problem;
  robust_problem.system = Augment(problem.system, copies);
  robust_problem.target = MseTarget(
      sigma.mean_weights, Vector::Zero(problem.system.n()), mse_level);
  const MinTimeResult robust = MinTime(StackStates(sigma.points), 0.0, t_max,
                                       robust_problem, robust_solver);

  UnscentedReport report;
  report.nominal_t_star = nominal.t_star;
  report.robust_t_star = robust.t_star;
  report.samples = samples;
  report.converged = nominal.solution.converged && robust.solution.converged;

  // Controls act on the original system; the augmented copies share u.
  auto controls_of = [&](const MinTimeResult& r, const HopfProblem& p) {
    if (r.t_star <= 0.0) return Trajectory{};
    return Reconstruct(r.solution, r.t_star, p);
  };
  const Trajectory nominal_traj = controls_of(nominal, problem);
  const Trajectory robust_traj = controls_of(robust, robust_problem);

  const Eigen::Index n = problem.system.n();
  if (samples_csv) {
    *samples_csv << "# seed=" << seed << " generator=mt19937_64\n";
    *samples_csv << "controller,sample,t";
    for (Eigen::Index i = 0; i < n; ++i) *samples_csv << ",x_" << i + 1;
    *samples_csv << ",hit\n";
  }
  auto play = [&](const Trajectory& traj, const Vector& x0, const char* name,
                  int index) {
    std::vector<Vector> states{x0};
    if (traj.size() > 0) states = SimulateZeroOrderHold(problem.system, traj, x0);
    const bool hit = TerminalCostX(problem.target, states.back()) <= 0.0;
    if (samples_csv) {
      for (std::size_t j = 0; j < states.size(); ++j) {
        *samples_csv << name << ',' << index << ','
                     << FormatNumber(traj.size() ? traj.times[j] : 0.0);
        for (Eigen::Index i = 0; i < n; ++i) {
          *samples_csv << ',' << FormatNumber(states[j](i));
        }
        *samples_csv << ',' << (hit ? 1 : 0) << '\n';
      }
    }
    return hit;
  };

  const Matrix factor = CholeskyFactor(cov);
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Vector x0 = Draw(mu, factor, rng);
    report.nominal_hits += play(nominal_traj, x0, "nominal", s);
    report.robust_hits += play(robust_traj, x0, "unscented", s);
  }
  return report;
}

std::vector<BenchRow> RunBenchmark(const HopfProblem& problem,
                                   const SolverConfig& solver,
                                   const std::vector<int>& dims, int trials,
                                   double horizon, const Vector& mu,
                                   const Matrix& cov, double mse_level,
                                   std::uint64_t seed) {
  const Eigen::Index n = problem.system.n();
  const Matrix factor = CholeskyFactor(cov);
  std::mt19937_64 rng(seed);
  std::vector<BenchRow> rows;
  for (int dim : dims) {
    if (dim < n || dim % n != 0) {
      throw HopfError(ErrorCode::kInvalidArgument,
                      "benchmark dimension must be a multiple of n");
    }
    const int k = static_cast<int>(dim / n);
    HopfProblem p = problem;
    p.system = Augment(problem.system, k);
    p.target = MseTarget(std::vector<double>(k, 1.0 / k), Vector::Zero(n),
                         mse_level);
    BenchRow row;
    row.dim = dim;
    row.trials = trials;
    double total_ms = 0.0;
    double total_iters = 0.0;
    for (int t = 0; t < trials; ++t) {
      std::vector<Vector> states;
      for (int i = 0; i < k; ++i) states.push_back(Draw(mu, factor, rng));
      const Vector x0 = StackStates(states);
      const auto start = Clock::now();
      const HopfSolution s = SolveHopf(x0, horizon, p, solver);
      total_ms += MillisecondsSince(start);
      total_iters += s.iterations;
      row.all_converged = row.all_converged && s.converged;
    }
    row.avg_ms = total_ms / trials;
    row.avg_iters = total_iters / trials;
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> PolynomialFit(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) {
    throw HopfError(ErrorCode::kInvalidArgument, "fit needs matching samples");
  }
  const std::set<double> distinct(x.begin(), x.end());
  const int degree = static_cast<int>(std::min<std::size_t>(distinct.size(), 3)) - 1;
  Matrix vander(static_cast<Eigen::Index>(x.size()), degree + 1);
  Vector rhs(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    double power = 1.0;
    for (int d = 0; d <= degree; ++d) {
      vander(static_cast<Eigen::Index>(i), d) = power;
      power *= x[i];
    }
    rhs(static_cast<Eigen::Index>(i)) = y[i];
  }
  const Vector c = vander.colPivHouseholderQr().solve(rhs);
  return std::vector<double>(c.data(), c.data() + c.size());
}

}  // namespace hopf
