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

#ifndef HOPF_CONVEX_H_
#define HOPF_CONVEX_H_

#include "hopf/problem.h"

namespace hopf {

/// sup over c in the set of <q, c>: the l1 norm for the box, l2 for the ball.
double Support(const ControlSet& set, const Eigen::Ref<const Vector>& q);

/// Euclidean projection onto the unit set.
Vector Project(const ControlSet& set, const Eigen::Ref<const Vector>& y);

/// In-place projection onto the scaled set `scale * U`.
void ProjectScaledInPlace(ControlShape shape, double scale,
                          Eigen::Ref<Vector> y);

/// Resolvent of the indicator of dt * U: dt * Project(set, y / dt).
Vector ProxFStarBlock(const Eigen::Ref<const Vector>& y, double delta_t,
                      const ControlSet& set);

/**
 * @brief G(p) = 1/4 <p, M p> + constant - <shift, p>.
 *
 * For the ellipsoidal target this is the Fenchel conjugate of the terminal
 * cost in the transformed coordinates, with M = e^{-TA} W e^{-TA^T}, plus the
 * linear term of the Hopf objective.
 */
struct QuadraticConjugate {
  Matrix m;
  double constant = 0.0;
  Vector shift;

  /// 1/4 <p, M p> + constant; the shift is not included.
  double Quadratic(const Eigen::Ref<const Vector>& p) const {
    return 0.25 * p.dot(m * p) + constant;
  }
  double Value(const Eigen::Ref<const Vector>& p) const {
    return Quadratic(p) - shift.dot(p);
  }
};

/// Conjugate of the terminal cost at horizon T with the given shift z0.
/// T = 0 is allowed and yields M = W.
QuadraticConjugate MakeConjugate(const HopfProblem& problem, double horizon,
                                 const Vector& shift);

/**
 * @brief Resolvent (I + tau dG)^{-1} for a fixed tau, solving
 * (I + tau/2 M) w = p + tau z0 with a cached Cholesky factor.
 */
class QuadraticProx {
 public:
  QuadraticProx(const Matrix& m, double tau);

  double tau() const { return tau_; }

  /// Writes the prox of tau G at p into `out` (which must not alias p).
  void Apply(const Eigen::Ref<const Vector>& p,
             const Eigen::Ref<const Vector>& shift,
             Eigen::Ref<Vector> out) const;

  Vector Apply(const Eigen::Ref<const Vector>& p,
               const Eigen::Ref<const Vector>& shift) const;

 private:
  double tau_;
  Eigen::LLT<Matrix> llt_;
};

/// One-shot prox of tau G at p; tau = 0 returns p.
Vector ProxG(const QuadraticConjugate& q, const Eigen::Ref<const Vector>& p,
             double tau);

}  // namespace hopf

#endif  // HOPF_CONVEX_H_
