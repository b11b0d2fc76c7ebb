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

#ifndef HOPF_TRAJECTORY_H_
#define HOPF_TRAJECTORY_H_

#include <optional>
#include <ostream>
#include <vector>

#include "hopf/convex.h"
#include "hopf/hopf_solver.h"
#include "hopf/matexp.h"
#include "hopf/problem.h"

namespace hopf {

/**
 * @brief Optimal trajectory sampled on the quadrature grid, in forward time.
 *
 * times[0] = 0 and times.back() = T*. z_states[j] is the state in the
 * transformed coordinates z = e^{-tA} x, x_states[j] = e^{t_j A} z_states[j].
 * controls[j] is held constant on [times[j], times[j+1]); the last entry
 * repeats the final held value so every sample row is complete.
 */
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> z_states;
  std::vector<Vector> x_states;
  std::vector<Vector> controls;

  std::size_t size() const { return times.size(); }
};

/// Gradient of 1/4 <p, M p> + c: the optimal terminal state in z.
Vector GradJStar(const QuadraticConjugate& conjugate,
                 const Eigen::Ref<const Vector>& p);

/// Maximizer of <q, c> over the unit set. Box: sign(q) with sign(0) = +1.
/// Ball: q / ||q||, or the first basis vector when q = 0.
Vector ArgmaxControl(const ControlSet& set, const Eigen::Ref<const Vector>& q);

/// Supergradient K_i^T c* of p -> support(K_i p), c* = ArgmaxControl(K_i p).
Vector GradH(const StackedOperator& stack, const ControlSet& set,
             const Eigen::Ref<const Vector>& p, int block);

/**
 * @brief Rebuilds the optimal trajectory from a converged Hopf minimizer.
 *
 * The backward partial sums S_{-1} = GradJStar(p*), S_i = S_{i-1} +
 * w_i GradH(p*, i) walk from the terminal state (forward time T*) towards the
 * initial state; block i spans w_i seconds ending at forward time T* - t_i.
 * The chain is then reversed so times run from 0 to T*. In forward time the
 * z-dynamics are z' = e^{-tA} B u, and block i holds u = Q c*_i.
 *
 * At blocks where the argmax is not unique (K_i p* = 0 on a box face) the
 * choice matters; passing the solver's dual iterate selects c_i =
 * y*_i / w_i, the subgradient for which the chain closes at z0.
 *
 * When B lacks full column rank, u is instead the least-squares solution of
 * e^{-(T* - t_i) A} B u = -GradH(p*, i); a residual above
 * 1e-6 (1 + ||GradH||) throws kControlInconsistent.
 */
Trajectory Reconstruct(const Eigen::Ref<const Vector>& p_star, double t_star,
                       const HopfProblem& problem,
                       const std::optional<Vector>& dual = std::nullopt);

/// Reconstruct from a HopfSolution, using its dual iterate when present.
Trajectory Reconstruct(const HopfSolution& solution, double t_star,
                       const HopfProblem& problem);

/// Same as above for an already-assembled stack and conjugate at t_star.
Trajectory Reconstruct(const Eigen::Ref<const Vector>& p_star,
                       const StackedOperator& stack,
                       const QuadraticConjugate& conjugate,
                       const HopfProblem& problem,
                       const std::optional<Vector>& dual = std::nullopt);

/// Exact zero-order-hold playback of trajectory.controls on the true
/// dynamics from x0; returns the states at trajectory.times.
std::vector<Vector> SimulateZeroOrderHold(const LinearSystem& system,
                                          const Trajectory& trajectory,
                                          const Vector& x0);

/// Header row `t,z_1..z_n,x_1..x_n,u_1..u_m`, then one row per sample.
void WriteTrajectoryCsv(std::ostream& os, const Trajectory& trajectory);

}  // namespace hopf

#endif  // HOPF_TRAJECTORY_H_
