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

#include "hopf/problem.h"

#include <cmath>
#include <sstream>
#include <utility>

#include <Eigen/SVD>

namespace hopf {

const char* ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kNotPositiveDefinite:
      return "NotPositiveDefinite";
    case ErrorCode::kSingularScaling:
      return "SingularScaling";
    case ErrorCode::kNonOriginTarget:
      return "NonOriginTarget";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kNonFinite:
      return "NonFinite";
    case ErrorCode::kHorizonNonPositive:
      return "HorizonNonPositive";
    case ErrorCode::kFactorizationFailed:
      return "FactorizationFailed";
    case ErrorCode::kStepSizeViolation:
      return "StepSizeViolation";
    case ErrorCode::kNoSignChange:
      return "NoSignChange";
    case ErrorCode::kMaxOuterIter:
      return "MaxOuterIter";
    case ErrorCode::kControlInconsistent:
      return "ControlInconsistent";
    case ErrorCode::kNonPositiveWeight:
      return "NonPositiveWeight";
    case ErrorCode::kNonOriginGoal:
      return "NonOriginGoal";
    case ErrorCode::kNotTwoDimensional:
      return "NotTwoDimensional";
  }
  return "Unknown";
}

LinearSystem LinearSystem::DoubleIntegrator() {
  LinearSystem sys;
  sys.a = Matrix::Zero(2, 2);
  sys.a(0, 1) = 1.0;
  sys.b = Matrix::Zero(2, 1);
  sys.b(1, 0) = 1.0;
  sys.q = Matrix::Identity(1, 1);
  return sys;
}

QuadraticTarget::QuadraticTarget(Matrix w, double level,
                                 std::optional<Vector> center)
    : w_(std::move(w)), level_(level) {
  center_ = center ? *center : Vector::Zero(w_.rows());
  if (w_.rows() == w_.cols() && w_.rows() > 0 && w_.allFinite()) {
    const double scale = std::max(1.0, w_.cwiseAbs().maxCoeff());
    const bool symmetric = (w_ - w_.transpose()).cwiseAbs().maxCoeff() <=
                           1e-12 * scale;
    if (symmetric) {
      llt_.compute(w_);
      positive_definite_ = llt_.info() == Eigen::Success;
    }
  }
}

QuadraticTarget QuadraticTarget::Ball(Eigen::Index n, double radius) {
  return QuadraticTarget(radius * radius * Matrix::Identity(n, n), 1.0);
}

Vector QuadraticTarget::SolveW(const Eigen::Ref<const Vector>& x) const {
  if (!positive_definite_) {
    throw HopfError(ErrorCode::kNotPositiveDefinite,
                    "target shape matrix W is not symmetric positive definite");
  }
  if (x.size() != w_.rows()) {
    throw HopfError(ErrorCode::kDimensionMismatch,
                    "vector does not match target dimension");
  }
  return llt_.solve(x);
}

namespace {

std::string Shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

std::vector<Violation> Validate(const HopfProblem& problem) {
  std::vector<Violation> out;
  const LinearSystem& sys = problem.system;
  const Eigen::Index n = sys.a.rows();
  const Eigen::Index m = sys.b.cols();

  auto add = [&out](ErrorCode code, std::string msg) {
    out.push_back({code, std::move(msg)});
  };

  if (n < 1 || sys.a.cols() != n) {
    add(ErrorCode::kDimensionMismatch, "A must be square and nonempty, got " +
                                           Shape(sys.a));
  }
  if (sys.b.rows() != n || m < 1) {
    add(ErrorCode::kDimensionMismatch,
        "B must be " + std::to_string(n) + "xm with m >= 1, got " +
            Shape(sys.b));
  }
  if (sys.q.rows() != m || sys.q.cols() != m) {
    add(ErrorCode::kDimensionMismatch, "Q must be " + std::to_string(m) + "x" +
                                           std::to_string(m) + ", got " +
                                           Shape(sys.q));
  } else if (m > 0) {
    const Eigen::JacobiSVD<Matrix> svd(sys.q);
    const auto& s = svd.singularValues();
    if (!sys.q.allFinite() || s(s.size() - 1) <= 0.0 ||
        s(0) / s(s.size() - 1) > 1e12) {
      add(ErrorCode::kSingularScaling, "Q is singular or ill-conditioned");
    }
  }
  if (!sys.a.allFinite() || !sys.b.allFinite()) {
    add(ErrorCode::kNonFinite, "A or B has non-finite entries");
  }
  if (problem.control_set.dim != m) {
    add(ErrorCode::kDimensionMismatch,
        "control set dimension " + std::to_string(problem.control_set.dim) +
            " does not match m = " + std::to_string(m));
  }

  const QuadraticTarget& target = problem.target;
  if (target.w().rows() != n || target.w().cols() != n) {
    add(ErrorCode::kDimensionMismatch, "W must be " + std::to_string(n) + "x" +
                                           std::to_string(n) + ", got " +
                                           Shape(target.w()));
  } else if (!target.positive_definite()) {
    add(ErrorCode::kNotPositiveDefinite,
        "W is not symmetric positive definite");
  }
  if (!(target.level() > 0.0) || !std::isfinite(target.level())) {
    add(ErrorCode::kInvalidArgument, "target level must be positive");
  }
  if (target.center().size() != target.w().rows() ||
      (target.center().size() > 0 && target.center().cwiseAbs().maxCoeff() != 0.0)) {
    add(ErrorCode::kNonOriginTarget,
        "only origin-centered ellipsoidal targets are supported");
  }
  if (problem.quadrature_n < 1) {
    add(ErrorCode::kInvalidArgument, "quadrature_n must be >= 1");
  }
  return out;
}

void CheckValid(const HopfProblem& problem) {
  const auto violations = Validate(problem);
  if (!violations.empty()) {
    throw HopfError(violations.front().code, violations.front().message);
  }
}

void CheckValid(const SolverConfig& config) {
  if (!(config.tau > 0.0)) {
    throw HopfError(ErrorCode::kInvalidArgument, "tau must be positive");
  }
  if (config.sigma && !(*config.sigma > 0.0)) {
    throw HopfError(ErrorCode::kInvalidArgument, "sigma must be positive");
  }
  if (!(config.theta >= 0.0 && config.theta <= 1.0)) {
    throw HopfError(ErrorCode::kInvalidArgument, "theta must lie in [0, 1]");
  }
  if (!(config.epsilon > 0.0)) {
    throw HopfError(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
  if (config.max_iter < 1) {
    throw HopfError(ErrorCode::kInvalidArgument, "max_iter must be >= 1");
  }
  if (!(config.norm_safety > 0.0 && config.norm_safety <= 1.0)) {
    throw HopfError(ErrorCode::kInvalidArgument,
                    "norm_safety must lie in (0, 1]");
  }
}

double TerminalCostX(const QuadraticTarget& target,
                     const Eigen::Ref<const Vector>& x) {
  return x.dot(target.SolveW(x)) - target.level();
}

}  // namespace hopf
