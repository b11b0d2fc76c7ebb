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


#include "hopf/hopf_solver.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"

namespace hopf {
namespace {

Vector V2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

HopfProblem DoubleIntegrator() {
  HopfProblem p;
  p.system = LinearSystem::DoubleIntegrator();
  p.control_set = ControlSet::Box(1);
  p.target = QuadraticTarget::Ball(2, 0.2);
  return p;
}

// x' = u with |u|_2 <= 1 in the plane: the reachable set from z after T is
// a disc of radius T, so phi = max(|z| - T, 0)^2 / r^2 - 1.
HopfProblem PlanarDriftFree(double radius) {
  HopfProblem p;
  p.system.a = Matrix::Zero(2, 2);
  p.system.b = Matrix::Identity(2, 2);
  p.system.q = Matrix::Identity(2, 2);
  p.control_set = ControlSet::Ball(2);
  p.target = QuadraticTarget::Ball(2, radius);
  p.quadrature_n = 10;
  return p;
}

double PlanarValue(const Vector& z, double horizon, double radius) {
  const double gap = std::max(z.norm() - horizon, 0.0);
  return gap * gap / (radius * radius) - 1.0;
}

SolverConfig Config(double tau = 10.0) {
  SolverConfig c;
  c.tau = tau;
  return c;
}

TEST(HopfObjectiveTest, MatchesDirectEvaluation) {
  const HopfProblem p = DoubleIntegrator();
  const Vector z0 = V2(1.0, 0.3);
  const HopfEvaluator eval(p, 1.2, Config());
  const oracle::BruteHopf brute(p, z0, 1.2);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector q = V2(normal(rng), normal(rng));
    const double ours = HopfObjective(q, z0, eval.stack(), eval.conjugate(),
                                      p.control_set);
    EXPECT_NEAR(ours, brute.Objective(q), 1e-11 * (1.0 + std::abs(ours)));
  }
}

TEST(HopfObjectiveTest, OriginGivesConstant) {
  const HopfProblem p = DoubleIntegrator();
  const HopfEvaluator eval(p, 1.0, Config());
  EXPECT_DOUBLE_EQ(HopfObjective(Vector::Zero(2), V2(1.0, 0.0), eval.stack(),
                                 eval.conjugate(), p.control_set),
                   1.0);
}

TEST(HopfObjectiveTest, NoInputClosedFormMinimum) {
  HopfProblem p = DoubleIntegrator();
  p.system.a.setZero();
  p.system.b.setZero();
  p.target = QuadraticTarget(Matrix::Identity(2, 2));
  const HopfEvaluator eval(p, 1.0, Config());
  const Vector z0 = V2(1.0, 0.0);
  // grad(1/4 |p|^2 + 1 - <z0, p>) = 0 at p = 2 z0, objective 1 - |z0|^2.
  EXPECT_DOUBLE_EQ(HopfObjective(2.0 * z0, z0, eval.stack(), eval.conjugate(),
                                 p.control_set),
                   0.0);
  const HopfSolution sol = eval.Solve(z0);
  EXPECT_LT((sol.minimizer - 2.0 * z0).norm(), 1e-3);
}

TEST(HopfSolverTest, ValueMatchesBruteForceMinimum) {
  const HopfProblem p = DoubleIntegrator();
  const Vector z0 = V2(1.0, 0.0);
  const HopfSolution sol = SolveHopf(z0, 1.0, p, Config());
  ASSERT_TRUE(sol.converged);
  Vector argmin;
  const double oracle = oracle::BruteHopf(p, z0, 1.0).MinimizeValue2D(20.0, 401, &argmin);
  EXPECT_NEAR(sol.value, oracle, 1e-4 * (1.0 + std::abs(oracle)));
  EXPECT_LT((sol.minimizer - argmin).norm(), 1e-2 * (1.0 + argmin.norm()));
}

TEST(HopfSolverTest, ValueIsMinusObjectiveAtMinimizer) {
  const HopfProblem p = DoubleIntegrator();
  const Vector z0 = V2(0.7, -0.4);
  const HopfEvaluator eval(p, 0.8, Config());
  const HopfSolution sol = eval.Solve(z0);
  EXPECT_DOUBLE_EQ(sol.value, -HopfObjective(sol.minimizer, z0, eval.stack(),
                                              eval.conjugate(), p.control_set));
}

TEST(HopfSolverTest, ConvergedImpliesResidualsBelowEpsilon) {
  const HopfProblem p = DoubleIntegrator();
  for (double t : {0.3, 1.0, 2.0}) {
    const HopfSolution sol = SolveHopf(V2(1.0, 0.2), t, p, Config());
    ASSERT_TRUE(sol.converged);
    EXPECT_LT(sol.primal_residual, 1e-4);
    EXPECT_LT(sol.dual_residual, 1e-4);
    EXPECT_GT(sol.iterations, 0);
  }
}

TEST(HopfSolverTest, PlanarClosedForm) {
  const double r = 0.3;
  const HopfProblem p = PlanarDriftFree(r);
  SolverConfig c = Config(1.0);
  c.epsilon = 1e-8;
  for (const Vector& z : {V2(1.0, 0.0), V2(-0.6, 0.8), V2(0.2, 0.1)}) {
    for (double t : {0.25, 0.5}) {
      const HopfSolution sol = SolveHopf(z, t, p, c);
      ASSERT_TRUE(sol.converged);
      EXPECT_NEAR(sol.value, PlanarValue(z, t, r), 1e-6) << z.transpose() << " " << t;
    }
  }
}

TEST(HopfSolverTest, NoControlAuthorityGivesTerminalCost) {
  HopfProblem p = DoubleIntegrator();
  p.system.a.setZero();
  p.system.b.setZero();
  const Vector z = V2(0.5, -0.1);
  SolverConfig c = Config(1.0);
  c.epsilon = 1e-9;
  const HopfSolution sol = SolveHopf(z, 1.0, p, c);
  ASSERT_TRUE(sol.converged);
  EXPECT_NEAR(sol.value, TerminalCostX(p.target, z), 1e-7);
}

TEST(HopfSolverTest, ZeroHorizonShortCircuits) {
  const HopfProblem p = DoubleIntegrator();
  const Vector z = V2(1.0, 0.0);
  const HopfSolution sol = SolveHopf(z, 0.0, p, Config());
  EXPECT_TRUE(sol.converged);
  EXPECT_EQ(sol.iterations, 0);
  EXPECT_DOUBLE_EQ(sol.value, 24.0);
  EXPECT_LT((sol.minimizer - V2(50.0, 0.0)).norm(), 1e-12);  // 2 W^-1 z
}

TEST(HopfSolverTest, InsideTargetIsNegative) {
  const HopfSolution sol = SolveHopf(V2(0.0, 0.0), 0.1, DoubleIntegrator(), Config());
  ASSERT_TRUE(sol.converged);
  EXPECT_LT(sol.value, 0.0);
}

TEST(HopfSolverTest, DualBlocksAreFeasible) {
  const HopfProblem p = DoubleIntegrator();
  const HopfEvaluator eval(p, 1.5, Config());
  const HopfSolution sol = eval.Solve(V2(1.0, 0.0));
  ASSERT_EQ(sol.dual.size(), eval.stack().k.rows());
  for (int i = 0; i < eval.stack().blocks(); ++i) {
    EXPECT_LE(std::abs(sol.dual(i)), eval.stack().weights[i] * (1.0 + 1e-12));
  }
}

TEST(HopfSolverTest, IterationCapReportsNotConverged) {
  SolverConfig c = Config();
  c.max_iter = 3;
  const HopfSolution sol = SolveHopf(V2(1.0, 0.0), 1.0, DoubleIntegrator(), c);
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 3);
  EXPECT_TRUE(std::isfinite(sol.value));
}

TEST(HopfSolverTest, Errors) {
  const HopfProblem p = DoubleIntegrator();
  EXPECT_THROW(SolveHopf(Vector::Zero(3), 1.0, p, Config()), HopfError);
  EXPECT_THROW(SolveHopf(V2(1, 0), -1.0, p, Config()), HopfError);
  EXPECT_THROW(SolveHopf(V2(1, 0), 1.0, p, Config(), Vector::Zero(3)), HopfError);
  SolverConfig c = Config();
  c.sigma = 10.0;
  try {
    HopfEvaluator eval(p, 1.0, c);
    FAIL();
  } catch (const HopfError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStepSizeViolation);
  }
}

TEST(HopfSolverTest, AutoSigmaRespectsStepBound) {
  const HopfEvaluator eval(DoubleIntegrator(), 2.0, Config());
  const double n = eval.stack().norm_estimate;
  EXPECT_LT(eval.config().tau * eval.sigma() * n * n, 1.0);
  EXPECT_NEAR(eval.config().tau * eval.sigma() * n * n, 0.99, 1e-12);
}

TEST(HopfSolverPropertyTest, ConvexInInitialState) {
  const HopfProblem p = DoubleIntegrator();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(-1.5, 1.5);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  const HopfEvaluator eval(p, 1.0, Config());
  for (int trial = 0; trial < 10; ++trial) {
    const Vector a = V2(unit(rng), unit(rng)), b = V2(unit(rng), unit(rng));
    const double l = lam(rng);
    const double mid = eval.Solve(l * a + (1 - l) * b).value;
    const double chord = l * eval.Solve(a).value + (1 - l) * eval.Solve(b).value;
    EXPECT_LE(mid, chord + 1e-6);
  }
}

TEST(HopfSolverPropertyTest, NonincreasingInHorizon) {
  const HopfProblem p = DoubleIntegrator();
  const Vector z = V2(1.0, 0.0);
  double previous = SolveHopf(z, 0.2, p, Config()).value;
  for (double t = 0.4; t <= 2.4; t += 0.2) {
    const double v = SolveHopf(z, t, p, Config()).value;
    EXPECT_LE(v, previous + 1e-6);
    previous = v;
  }
}

TEST(HopfSolverPropertyTest, WarmStartInvariance) {
  const HopfProblem p = DoubleIntegrator();
  const HopfEvaluator eval(p, 1.3, Config());
  const Vector z = V2(0.9, -0.3);
  const HopfSolution cold = eval.Solve(z);
  for (const Vector& warm : {V2(0, 0), V2(5, -5), V2(-20, 3), cold.minimizer}) {
    const HopfSolution hot = eval.Solve(z, warm);
    ASSERT_TRUE(hot.converged);
    EXPECT_NEAR(hot.value, cold.value, 1e-4);
  }
}

TEST(HopfSolverPropertyTest, Deterministic) {
  const HopfProblem p = DoubleIntegrator();
  const HopfSolution a = SolveHopf(V2(1.0, 0.0), 1.1, p, Config());
  const HopfSolution b = SolveHopf(V2(1.0, 0.0), 1.1, p, Config());
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.minimizer, b.minimizer);
}

}  // namespace
}  // namespace hopf
