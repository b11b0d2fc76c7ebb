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

#include "hopf/convex.h"

#include "hopf/matexp.h"

namespace hopf {
namespace {

void CheckDim(const ControlSet& set, Eigen::Index size) {
  if (size != set.dim) {
    throw HopfError(ErrorCode::kDimensionMismatch,
                    "vector does not match control set dimension");
  }
}

}  // namespace

double Support(const ControlSet& set, const Eigen::Ref<const Vector>& q) {
  CheckDim(set, q.size());
  switch (set.shape) {
    case ControlShape::kUnitBox:
      return q.lpNorm<1>();
    case ControlShape::kUnitBall:
      return q.norm();
  }
  return 0.0;
}

void ProjectScaledInPlace(ControlShape shape, double scale,
                          Eigen::Ref<Vector> y) {
  switch (shape) {
    case ControlShape::kUnitBox:
      y = y.cwiseMax(-scale).cwiseMin(scale);
      break;
    case ControlShape::kUnitBall: {
      const double norm = y.norm();
      if (norm > scale) y *= scale / norm;
      break;
    }
  }
}

Vector Project(const ControlSet& set, const Eigen::Ref<const Vector>& y) {
  CheckDim(set, y.size());
  Vector out = y;
  ProjectScaledInPlace(set.shape, 1.0, out);
  return out;
}

Vector ProxFStarBlock(const Eigen::Ref<const Vector>& y, double delta_t,
                      const ControlSet& set) {
  if (!(delta_t > 0.0)) {
    throw HopfError(ErrorCode::kInvalidArgument, "delta_t must be positive");
  }
  return delta_t * Project(set, y / delta_t);
}

QuadraticConjugate MakeConjugate(const HopfProblem& problem, double horizon,
                                 const Vector& shift) {
  const Matrix& w = problem.target.w();
  QuadraticConjugate q;
  if (horizon == 0.0) {
    q.m = w;
  } else {
    const Matrix back = Expm(problem.system.a, -horizon);
    q.m = back * w * back.transpose();
    q.m = 0.5 * (q.m + q.m.transpose()).eval();
  }
  q.constant = problem.target.level();
  q.shift = shift;
  return q;
}

QuadraticProx::QuadraticProx(const Matrix& m, double tau) : tau_(tau) {
  if (tau < 0.0) {
    throw HopfError(ErrorCode::kInvalidArgument, "tau must be nonnegative");
  }
  Matrix system = 0.5 * tau * m;
  system.diagonal().array() += 1.0;
  llt_.compute(system);
  if (llt_.info() != Eigen::Success) {
    throw HopfError(ErrorCode::kFactorizationFailed,
                    "I + tau/2 M is not positive definite");
  }
}

void QuadraticProx::Apply(const Eigen::Ref<const Vector>& p,
                          const Eigen::Ref<const Vector>& shift,
                          Eigen::Ref<Vector> out) const {
  out = p + tau_ * shift;
  llt_.solveInPlace(out);
}

Vector QuadraticProx::Apply(const Eigen::Ref<const Vector>& p,
                            const Eigen::Ref<const Vector>& shift) const {
  Vector out(p.size());
  Apply(p, shift, out);
  return out;
}

Vector ProxG(const QuadraticConjugate& q, const Eigen::Ref<const Vector>& p,
             double tau) {
  if (tau == 0.0) return p;
  const Vector shift =
      q.shift.size() == p.size() ? q.shift : Vector::Zero(p.size());
  return QuadraticProx(q.m, tau).Apply(p, shift);
}

}  // namespace hopf
