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

#ifndef HOPF_HOPF_SOLVER_H_
#define HOPF_HOPF_SOLVER_H_

#include <optional>

#include "hopf/convex.h"
#include "hopf/matexp.h"
#include "hopf/problem.h"

namespace hopf {

struct HopfSolution {
  double value = 0.0;  ///< phi(z0, T)
  Vector minimizer;    ///< p*, the spatial gradient of phi where it exists
  Vector dual;         ///< y*, stacked per block; y*_i / w_i is a subgradient
                       ///< choice of the support term (empty for T ~ 0)
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
};

/// The discretized Hopf objective
///   1/4 <p, M p> + c + sum_i w_i support(K_i p) - <z0, p>,
/// whose negated minimum is phi(z0, T). The shift stored in `conjugate` is
/// ignored in favour of `z0`.
double HopfObjective(const Eigen::Ref<const Vector>& p,
                     const Eigen::Ref<const Vector>& z0,
                     const StackedOperator& stack,
                     const QuadraticConjugate& conjugate,
                     const ControlSet& set);

/**
 * @brief Primal-dual evaluator of phi(., T) for one problem and horizon.
 *
 * Construction assembles the stacked operator, the terminal conjugate and the
 * factored primal prox once; Solve() may then be called for many initial
 * states, concurrently, since it does not mutate the evaluator.
 *
 * Horizons at or below kShortHorizon short-circuit to phi = J_x(z0) with the
 * exact minimizer p* = 2 W^{-1} z0.
 */
class HopfEvaluator {
 public:
  static constexpr double kShortHorizon = 1e-9;

  /// Throws kStepSizeViolation when tau sigma ||K||^2 >= 1.
  HopfEvaluator(const HopfProblem& problem, double horizon,
                const SolverConfig& config);

  HopfSolution Solve(const Vector& z0,
                     const std::optional<Vector>& warm_start = std::nullopt) const;

  double horizon() const { return horizon_; }
  double sigma() const { return sigma_; }
  bool short_horizon() const { return short_horizon_; }
  const HopfProblem& problem() const { return problem_; }
  const SolverConfig& config() const { return config_; }
  const StackedOperator& stack() const { return stack_; }
  const QuadraticConjugate& conjugate() const { return conjugate_; }

 private:
  HopfProblem problem_;
  SolverConfig config_;
  double horizon_;
  bool short_horizon_;
  StackedOperator stack_;
  QuadraticConjugate conjugate_;
  std::optional<QuadraticProx> prox_;
  Vector row_bounds_;  // quadrature weight of the block owning each row of K
  double sigma_ = 0.0;
};

/// phi(z0, T) and its minimizer. Equivalent to HopfEvaluator(...).Solve().
HopfSolution SolveHopf(const Vector& z0, double horizon,
                       const HopfProblem& problem, const SolverConfig& config,
                       const std::optional<Vector>& warm_start = std::nullopt);

}  // namespace hopf

#endif  // HOPF_HOPF_SOLVER_H_
