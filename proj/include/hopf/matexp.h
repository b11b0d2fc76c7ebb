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

#ifndef HOPF_MATEXP_H_
#define HOPF_MATEXP_H_

#include <vector>

#include "hopf/problem.h"

namespace hopf {

/**
 * @brief Dense e^{tA} by scaling and squaring with a degree <= 13 Pade
 * approximant chosen from the 1-norm of tA.
 *
 * Returns the identity exactly for t = 0. Throws kNonFinite for NaN/Inf
 * entries or t.
 */
Matrix Expm(const Matrix& a, double t);

/**
 * @brief e^{tA} M without forming e^{tA} when M has few columns.
 *
 * Uses a shifted, scaled Taylor series applied to the columns of M when
 * 4 k <= n (k columns, n rows); otherwise falls back to Expm(a, t) * M.
 */
Matrix ExpmAction(const Matrix& a, double t, const Matrix& m);

/// Largest singular value of k by power iteration on K^T K.
///
/// Starts from the normalized all-ones vector and stops when successive
/// eigenvalue estimates agree to a relative `tol` or after `max_iter` steps.
double OperatorNorm(const Matrix& k, double tol = 1e-8, int max_iter = 500);

/**
 * @brief The time-sampled operator K = [K_0; ...; K_{N-1}] of the discretized
 * Hopf objective, with K_i = (-e^{-(T - t_i) A} B Q)^T.
 *
 * Block i occupies rows [i m, (i + 1) m) of `k`. Each block carries its own
 * quadrature weight; for the left Riemann rule every weight equals delta_t.
 */
struct StackedOperator {
  Matrix k;
  std::vector<double> times;
  std::vector<double> weights;
  double delta_t = 0.0;
  double horizon = 0.0;
  double norm_estimate = 0.0;
  Eigen::Index block_rows = 0;

  int blocks() const { return static_cast<int>(times.size()); }

  auto Block(int i) const {
    return k.middleRows(static_cast<Eigen::Index>(i) * block_rows, block_rows);
  }
};

/// Builds the stack at horizon T > 0 (kHorizonNonPositive otherwise).
///
/// Left Riemann: t_i = i dt for i < N. Trapezoid: t_i = i dt for i <= N with
/// halved end weights.
StackedOperator AssembleStack(const HopfProblem& problem, double horizon);

}  // namespace hopf

#endif  // HOPF_MATEXP_H_
