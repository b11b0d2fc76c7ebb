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

#include "hopf/trajectory.h"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "hopf/csv.h"

namespace hopf {

Vector GradJStar(const QuadraticConjugate& conjugate,
                 const Eigen::Ref<const Vector>& p) {
  return 0.5 * (conjugate.m * p);
}

Vector ArgmaxControl(const ControlSet& set, const Eigen::Ref<const Vector>& q) {
  Vector c(q.size());
  switch (set.shape) {
    case ControlShape::kUnitBox:
      for (Eigen::Index j = 0; j < q.size(); ++j) c(j) = q(j) >= 0.0 ? 1.0 : -1.0;
      break;
    case ControlShape::kUnitBall: {
      const double norm = q.norm();
      if (norm > 0.0) {
        c = q / norm;
      } else {
        c.setZero();
        c(0) = 1.0;
      }
      break;
    }
  }
  return c;
}

Vector GradH(const StackedOperator& stack, const ControlSet& set,
             const Eigen::Ref<const Vector>& p, int block) {
  if (block < 0 || block >= stack.blocks()) {
    throw HopfError(ErrorCode::kInvalidArgument, "block index out of range");
  }
  const auto k_i = stack.Block(block);
  const Vector q = k_i * p;
  return k_i.transpose() * ArgmaxControl(set, q);
}

Trajectory Reconstruct(const Eigen::Ref<const Vector>& p_star, double t_star,
                       const HopfProblem& problem,
                       const std::optional<Vector>& dual) {
  CheckValid(problem);
  const StackedOperator stack = AssembleStack(problem, t_star);
  const QuadraticConjugate conjugate =
      MakeConjugate(problem, t_star, Vector::Zero(problem.system.n()));
  return Reconstruct(p_star, stack, conjugate, problem, dual);
}

Trajectory Reconstruct(const HopfSolution& solution, double t_star,
                       const HopfProblem& problem) {
  std::optional<Vector> dual;
  if (solution.dual.size() > 0) dual = solution.dual;
  return Reconstruct(solution.minimizer, t_star, problem, dual);
}

Trajectory Reconstruct(const Eigen::Ref<const Vector>& p_star,
                       const StackedOperator& stack,
                       const QuadraticConjugate& conjugate,
                       const HopfProblem& problem,
                       const std::optional<Vector>& dual) {
  const LinearSystem& sys = problem.system;
  const ControlSet& set = problem.control_set;
  const int blocks = stack.blocks();
  if (p_star.size() != sys.n()) {
    throw HopfError(ErrorCode::kDimensionMismatch,
                    "minimizer does not match the state dimension");
  }

  if (dual && dual->size() != stack.k.rows()) {
    throw HopfError(ErrorCode::kDimensionMismatch,
                    "dual iterate does not match the stacked operator");
  }

  const Eigen::ColPivHouseholderQR<Matrix> b_qr(sys.b);
  const bool full_column_rank = b_qr.rank() == sys.m();

  // Backward chain, index 0 is the terminal state.
  std::vector<Vector> chain;
  std::vector<double> chain_times;
  std::vector<Vector> block_controls;
  chain.reserve(blocks + 1);
  chain.push_back(GradJStar(conjugate, p_star));
  chain_times.push_back(stack.horizon);
  double elapsed = 0.0;
  for (int i = 0; i < blocks; ++i) {
    const auto k_i = stack.Block(i);
    const Vector c =
        dual ? Project(set, dual->segment(static_cast<Eigen::Index>(i) *
                                               stack.block_rows,
                                           stack.block_rows) /
                                stack.weights[i])
             : ArgmaxControl(set, k_i * p_star);
    const Vector grad = k_i.transpose() * c;
    chain.push_back(chain.back() + stack.weights[i] * grad);
    elapsed += stack.weights[i];
    chain_times.push_back(std::max(0.0, stack.horizon - elapsed));

    Vector u;
    if (full_column_rank) {
      u = sys.q * c;
    } else {
      // K_i^T = -e^{-(T - t_i) A} B Q, so e^{..} B u = -grad reads
      // K_i^T (Q^{-1} u) = grad.
      const Matrix lhs = k_i.transpose();
      const Vector unit = lhs.completeOrthogonalDecomposition().solve(grad);
      const double residual = (lhs * unit - grad).norm();
      if (residual > 1e-6 * (1.0 + grad.norm())) {
        throw HopfError(ErrorCode::kControlInconsistent,
                        "control extraction residual too large");
      }
      u = sys.q * unit;
    }
    block_controls.push_back(std::move(u));
  }
  chain_times.back() = 0.0;

  Trajectory traj;
  const std::size_t samples = chain.size();
  traj.times.resize(samples);
  traj.z_states.resize(samples);
  traj.x_states.resize(samples);
  traj.controls.resize(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const std::size_t back = samples - 1 - j;
    traj.times[j] = chain_times[back];
    traj.z_states[j] = chain[back];
    traj.x_states[j] = ExpmAction(sys.a, traj.times[j], chain[back]);
    // Forward interval j is covered by block `back - 1`.
    traj.controls[j] = block_controls[back > 0 ? back - 1 : 0];
  }
  return traj;
}

std::vector<Vector> SimulateZeroOrderHold(const LinearSystem& system,
                                          const Trajectory& trajectory,
                                          const Vector& x0) {
  const Eigen::Index n = system.n();
  const Eigen::Index m = system.m();
  if (x0.size() != n) {
    throw HopfError(ErrorCode::kDimensionMismatch,
                    "initial state does not match the state dimension");
  }
  std::vector<Vector> states;
  states.reserve(trajectory.size());
  states.push_back(x0);

  // e^{h [[A, B], [0, 0]]} = [[e^{hA}, int_0^h e^{sA} ds B], [0, I]].
  Matrix augmented = Matrix::Zero(n + m, n + m);
  augmented.topLeftCorner(n, n) = system.a;
  augmented.topRightCorner(n, m) = system.b;
  double cached_h = -1.0;
  Matrix transition;
  for (std::size_t j = 0; j + 1 < trajectory.size(); ++j) {
    const double h = trajectory.times[j + 1] - trajectory.times[j];
    if (std::abs(h - cached_h) > 1e-14 * std::max(1.0, h)) {
      transition = Expm(augmented, h);
      cached_h = h;
    }
    states.push_back(transition.topLeftCorner(n, n) * states.back() +
                     transition.topRightCorner(n, m) * trajectory.controls[j]);
  }
  return states;
}

void WriteTrajectoryCsv(std::ostream& os, const Trajectory& trajectory) {
  if (trajectory.size() == 0) return;
  const Eigen::Index n = trajectory.z_states.front().size();
  const Eigen::Index m = trajectory.controls.front().size();
  os << "t";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",z_" << i;
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x_" << i;
  for (Eigen::Index i = 1; i <= m; ++i) os << ",u_" << i;
  os << '\n';
  for (std::size_t j = 0; j < trajectory.size(); ++j) {
    os << FormatNumber(trajectory.times[j]);
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << FormatNumber(trajectory.z_states[j](i));
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << FormatNumber(trajectory.x_states[j](i));
    for (Eigen::Index i = 0; i < m; ++i) os << ',' << FormatNumber(trajectory.controls[j](i));
    os << '\n';
  }
}

}  // namespace hopf
