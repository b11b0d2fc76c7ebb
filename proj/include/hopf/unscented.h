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

#ifndef HOPF_UNSCENTED_H_
#define HOPF_UNSCENTED_H_

#include <vector>

#include "hopf/problem.h"

namespace hopf {

/// Scaled unscented transform parameters; lambda = alpha^2 (n + kappa) - n.
///
/// The defaults give lambda = 1/2, for which every mean weight equals
/// 1 / (2n + 1) and is strictly positive.
struct UnscentedParams {
  double alpha = 1.0;
  double beta = 2.0;
  double kappa = 0.5;
};

struct SigmaSet {
  std::vector<Vector> points;  ///< 2n + 1 points, points[0] = mean
  std::vector<double> mean_weights;
  std::vector<double> cov_weights;
  Vector source_mean;
  Matrix source_cov;
  double lambda = 0.0;

  /// Weighted mean and covariance of the points.
  Vector WeightedMean() const;
  Matrix WeightedCovariance() const;
};

/// Symmetric sigma points mu, mu +/- columns of sqrt((n + lambda) Sigma),
/// using the symmetric (eigendecomposition) square root. Throws
/// kNotPositiveDefinite unless Sigma is SPD.
SigmaSet SigmaPoints(const Vector& mu, const Matrix& sigma,
                     const UnscentedParams& params = {});

/// k copies of the system sharing one input: block-diagonal A, stacked B.
LinearSystem Augment(const LinearSystem& system, int copies);

/// Concatenates equally sized states into one augmented state.
Vector StackStates(const std::vector<Vector>& states);

/**
 * @brief Target encoding sum_i w_i ||x_i - goal||^2 <= level on the stacked
 * state, i.e. W = blockdiag(w_i^{-1} I_n).
 *
 * The goal must be the origin (kNonOriginGoal) and every weight positive
 * (kNonPositiveWeight).
 */
QuadraticTarget MseTarget(const std::vector<double>& weights, const Vector& goal,
                          double level);

}  // namespace hopf

#endif  // HOPF_UNSCENTED_H_
