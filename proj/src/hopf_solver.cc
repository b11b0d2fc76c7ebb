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

#include <algorithm>
#include <cmath>
#include <limits>

namespace hopf {

double HopfObjective(const Eigen::Ref<const Vector>& p,
                     const Eigen::Ref<const Vector>& z0,
                     const StackedOperator& stack,
                     const QuadraticConjugate& conjugate,
                     const ControlSet& set) {
  double hamiltonian = 0.0;
  if (stack.blocks() > 0) {
    const Vector kp = stack.k * p;
    for (int i = 0; i < stack.blocks(); ++i) {
      hamiltonian += stack.weights[i] *
                     Support(set, kp.segment(i * stack.block_rows,
                                             stack.block_rows));
    }
  }
  return conjugate.Quadratic(p) + hamiltonian - z0.dot(p);
}

HopfEvaluator::HopfEvaluator(const HopfProblem& problem, double horizon,
                             const SolverConfig& config)
    : problem_(problem),
      config_(config),
      horizon_(horizon),
      short_horizon_(horizon <= kShortHorizon) {
  CheckValid(problem_);
  CheckValid(config_);
  if (!std::isfinite(horizon) || horizon < 0.0) {
    throw HopfError(ErrorCode::kHorizonNonPositive,
                    "horizon must be finite and nonnegative");
  }
  const Eigen::Index n = problem_.system.n();
  if (short_horizon_) {
    conjugate_ = MakeConjugate(problem_, 0.0, Vector::Zero(n));
    return;
  }

  stack_ = AssembleStack(problem_, horizon_);
  conjugate_ = MakeConjugate(problem_, horizon_, Vector::Zero(n));
  prox_.emplace(conjugate_.m, config_.tau);

  row_bounds_.resize(stack_.k.rows());
  for (int i = 0; i < stack_.blocks(); ++i) {
    row_bounds_.segment(i * stack_.block_rows, stack_.block_rows)
        .setConstant(stack_.weights[i]);
  }

  const double norm_sq = stack_.norm_estimate * stack_.norm_estimate;
  if (config_.sigma) {
    sigma_ = *config_.sigma;
  } else {
    // A zero operator never moves the dual variable; any step works.
    sigma_ = norm_sq > 0.0 ? config_.norm_safety / (config_.tau * norm_sq)
                           : 1.0;
  }
  if (config_.tau * sigma_ * norm_sq >= 1.0) {
    throw HopfError(ErrorCode::kStepSizeViolation,
                    "tau * sigma * ||K||^2 must be < 1");
  }
}

HopfSolution HopfEvaluator::Solve(const Vector& z0,
                                  const std::optional<Vector>& warm_start) const {
  const Eigen::Index n = problem_.system.n();
  if (z0.size() != n || (warm_start && warm_start->size() != n)) {
    throw HopfError(ErrorCode::kDimensionMismatch,
                    "initial state does not match the state dimension");
  }

  HopfSolution sol;
  if (short_horizon_) {
    sol.value = TerminalCostX(problem_.target, z0);
    sol.minimizer = 2.0 * problem_.target.SolveW(z0);
    sol.converged = true;
    return sol;
  }

  const Matrix& k = stack_.k;
  const double tau = config_.tau;
  const double sigma = sigma_;
  const double theta = config_.theta;
  const ControlShape shape = problem_.control_set.shape;
  const Eigen::Index rows = k.rows();
  const Eigen::Index block = stack_.block_rows;

  Vector p = warm_start ? *warm_start : z0;
  Vector p_next(n);
  Vector kp = k * p;
  Vector kp_next(rows);
  Vector kp_bar = kp;
  Vector y = kp;
  Vector y_next(rows);
  Vector kty = k.transpose() * y;
  Vector kty_next(n);
  Vector work(n);

  Vector best = p;
  Vector best_y = y;
  double best_residual = std::numeric_limits<double>::infinity();
  double best_primal = 0.0;
  double best_dual = 0.0;

  int iter = 0;
  for (iter = 1; iter <= config_.max_iter; ++iter) {
    // Dual step: projection of each block onto w_i U.
    y_next = y + sigma * kp_bar;
    if (shape == ControlShape::kUnitBox) {
      y_next = y_next.cwiseMax(-row_bounds_).cwiseMin(row_bounds_);
    } else {
      for (int i = 0; i < stack_.blocks(); ++i) {
        ProjectScaledInPlace(shape, stack_.weights[i],
                             y_next.segment(i * block, block));
      }
    }
    kty_next.noalias() = k.transpose() * y_next;

    // Primal step.
    work = p - tau * kty_next;
    prox_->Apply(work, z0, p_next);
    kp_next.noalias() = k * p_next;

    const double primal =
        ((p_next - p) / tau - (kty_next - kty)).norm();
    const double dual =
        ((y_next - y) / sigma - (kp_next - kp)).norm();

    kp_bar = kp_next + theta * (kp_next - kp);
    p.swap(p_next);
    y.swap(y_next);
    kp.swap(kp_next);
    kty.swap(kty_next);

    if (primal < config_.epsilon && dual < config_.epsilon) {
      sol.converged = true;
      sol.primal_residual = primal;
      sol.dual_residual = dual;
      break;
    }
    const double worst = std::max(primal, dual);
    if (worst < best_residual) {
      best_residual = worst;
      best = p;
      best_y = y;
      best_primal = primal;
      best_dual = dual;
    }
  }

  if (sol.converged) {
    sol.iterations = iter;
    sol.minimizer = p;
    sol.dual = y;
  } else {
    sol.iterations = config_.max_iter;
    sol.minimizer = best;
    sol.dual = best_y;
    sol.primal_residual = best_primal;
    sol.dual_residual = best_dual;
  }
  sol.value = -HopfObjective(sol.minimizer, z0, stack_, conjugate_,
                             problem_.control_set);
  return sol;
}

HopfSolution SolveHopf(const Vector& z0, double horizon,
                       const HopfProblem& problem, const SolverConfig& config,
                       const std::optional<Vector>& warm_start) {
  return HopfEvaluator(problem, horizon, config).Solve(z0, warm_start);
}

}  // namespace hopf
