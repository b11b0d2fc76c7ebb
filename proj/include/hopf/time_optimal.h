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

#ifndef HOPF_TIME_OPTIMAL_H_
#define HOPF_TIME_OPTIMAL_H_

#include <vector>

#include "hopf/hopf_solver.h"

namespace hopf {

/// H_x(p, z0) = -<A z0, p> + support(U, -Q^T B^T p). Along the value
/// function, d phi / dT = -H_x(grad phi, x0).
double HamiltonianX(const Eigen::Ref<const Vector>& p,
                    const Eigen::Ref<const Vector>& z0,
                    const LinearSystem& system, const ControlSet& set);

struct MinTimeOptions {
  double value_tol = 1e-4;
  double time_tol = 1e-6;
  /// Newton is rejected when H_x falls below this.
  double h_min = 1e-8;
  int max_outer_iter = 100;
};

struct MinTimeStep {
  double horizon = 0.0;
  double value = 0.0;
  double hamiltonian = 0.0;
  bool newton = false;  ///< horizon came from a Newton step (else bisection)
};

struct MinTimeResult {
  double t_star = 0.0;
  HopfSolution solution;  ///< Hopf solve at t_star
  int newton_steps = 0;
  int bisection_steps = 0;
  double t_lo = 0.0;  ///< final bracket, phi(t_lo) > 0 > phi(t_hi)
  double t_hi = 0.0;
  std::vector<MinTimeStep> history;  ///< every evaluated horizon, in order
};

/**
 * @brief Smallest T in [t_lo, t_hi] with phi(x0, T) = 0.
 *
 * Hybrid Newton/bisection on T -> phi(x0, T) using the Hamilton-Jacobi
 * identity for the slope: t+ = t + phi / H_x(p*, x0). A Newton iterate that
 * leaves the current bracket, or a Hamiltonian below h_min, is replaced by the
 * bracket midpoint. Each Hopf solve is warm-started from the previous
 * minimizer. Assumes a single zero in the bracket.
 *
 * If phi(x0, 0) <= 0 with t_lo = 0 the state is already in the target and
 * t_star = 0 is reported. Throws kNoSignChange when phi has the same sign at
 * both ends, and kMaxOuterIter when the tolerances are not met in time.
 */
MinTimeResult MinTime(const Vector& x0, double t_lo, double t_hi,
                      const HopfProblem& problem, const SolverConfig& config,
                      const MinTimeOptions& options = {});

}  // namespace hopf

#endif  // HOPF_TIME_OPTIMAL_H_
