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

#ifndef HOPF_PROBLEM_H_
#define HOPF_PROBLEM_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "hopf/error.h"

namespace hopf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/**
 * @brief Linear dynamics x' = A x + B u with u = Q c, c in a unit control set.
 *
 * Q maps the unit set onto the problem-specific control bound and must be
 * invertible.
 */
struct LinearSystem {
  Matrix a;  ///< n x n drift, 1/time units
  Matrix b;  ///< n x m input map
  Matrix q;  ///< m x m control scaling

  Eigen::Index n() const { return a.rows(); }
  Eigen::Index m() const { return b.cols(); }

  /// Double integrator (position, velocity) with scalar input and Q = 1.
  static LinearSystem DoubleIntegrator();
};

enum class ControlShape { kUnitBox, kUnitBall };

/// Closed convex unit set: the box ||c||_inf <= 1 or the ball ||c||_2 <= 1.
struct ControlSet {
  ControlShape shape = ControlShape::kUnitBox;
  Eigen::Index dim = 1;

  static ControlSet Box(Eigen::Index dim) { return {ControlShape::kUnitBox, dim}; }
  static ControlSet Ball(Eigen::Index dim) { return {ControlShape::kUnitBall, dim}; }
};

/**
 * @brief Ellipsoidal target {x : <x, W^-1 x> <= level} with terminal cost
 * J(x) = <x, W^-1 x> - level.
 *
 * W is factored once at construction; it is never inverted explicitly.
 * A nonzero center is representable so that validation can reject it.
 */
class QuadraticTarget {
 public:
  QuadraticTarget() = default;
  explicit QuadraticTarget(Matrix w, double level = 1.0,
                           std::optional<Vector> center = std::nullopt);

  /// Circle/sphere of the given radius in n dimensions (W = r^2 I, level 1).
  static QuadraticTarget Ball(Eigen::Index n, double radius);

  const Matrix& w() const { return w_; }
  double level() const { return level_; }
  const Vector& center() const { return center_; }
  Eigen::Index dim() const { return w_.rows(); }

  /// True when W is symmetric and its Cholesky factorization succeeded.
  bool positive_definite() const { return positive_definite_; }

  /// W^-1 x via the cached factorization.
  Vector SolveW(const Eigen::Ref<const Vector>& x) const;

 private:
  Matrix w_;
  double level_ = 1.0;
  Vector center_;
  Eigen::LLT<Matrix> llt_;
  bool positive_definite_ = false;
};

enum class QuadratureRule { kLeftRiemann, kTrapezoid };

struct HopfProblem {
  LinearSystem system;
  ControlSet control_set;
  QuadraticTarget target;
  int quadrature_n = 100;
  QuadratureRule quadrature_rule = QuadratureRule::kLeftRiemann;
};

struct SolverConfig {
  double tau = 1.0;
  /// Explicit dual step; when empty sigma = norm_safety / (tau ||K||^2).
  std::optional<double> sigma;
  double theta = 1.0;
  double epsilon = 1e-4;
  int max_iter = 100000;
  double norm_safety = 0.99;
};

struct Violation {
  ErrorCode code;
  std::string message;
};

/// Every broken invariant of the problem; empty when the problem is valid.
std::vector<Violation> Validate(const HopfProblem& problem);

/// Throws HopfError carrying the first violation, if any.
void CheckValid(const HopfProblem& problem);

/// Checks the solver parameters that do not depend on the operator norm.
void CheckValid(const SolverConfig& config);

/// J_x(x) = <x, W^-1 x> - level; negative exactly inside the target.
double TerminalCostX(const QuadraticTarget& target,
                     const Eigen::Ref<const Vector>& x);

}  // namespace hopf

#endif  // HOPF_PROBLEM_H_
