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

#include "hopf/unscented.h"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace hopf {

Vector SigmaSet::WeightedMean() const {
  Vector mean = Vector::Zero(source_mean.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    mean += mean_weights[i] * points[i];
  }
  return mean;
}

Matrix SigmaSet::WeightedCovariance() const {
  const Eigen::Index n = source_mean.size();
  Matrix cov = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vector d = points[i] - source_mean;
    cov += cov_weights[i] * d * d.transpose();
  }
  return cov;
}

SigmaSet SigmaPoints(const Vector& mu, const Matrix& sigma,
                     const UnscentedParams& params) {
  const Eigen::Index n = mu.size();
  if (sigma.rows() != n || sigma.cols() != n) {
    throw HopfError(ErrorCode::kDimensionMismatch,
                    "covariance does not match the mean");
  }
  if (!sigma.allFinite() ||
      (sigma - sigma.transpose()).cwiseAbs().maxCoeff() >
          1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff())) {
    throw HopfError(ErrorCode::kNotPositiveDefinite,
                    "covariance is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw HopfError(ErrorCode::kNotPositiveDefinite,
                    "covariance is not positive definite");
  }

  SigmaSet set;
  set.source_mean = mu;
  set.source_cov = sigma;
  const double dim = static_cast<double>(n);
  set.lambda = params.alpha * params.alpha * (dim + params.kappa) - dim;
  const double spread = dim + set.lambda;
  if (!(spread > 0.0)) {
    throw HopfError(ErrorCode::kInvalidArgument, "n + lambda must be positive");
  }

  const Matrix root = eig.eigenvectors() *
                      (spread * eig.eigenvalues()).cwiseSqrt().asDiagonal() *
                      eig.eigenvectors().transpose();

  set.points.push_back(mu);
  for (Eigen::Index i = 0; i < n; ++i) set.points.push_back(mu + root.col(i));
  for (Eigen::Index i = 0; i < n; ++i) set.points.push_back(mu - root.col(i));

  const double w0 = set.lambda / spread;
  const double wi = 0.5 / spread;
  set.mean_weights.assign(2 * n + 1, wi);
  set.cov_weights.assign(2 * n + 1, wi);
  set.mean_weights[0] = w0;
  set.cov_weights[0] = w0 + (1.0 - params.alpha * params.alpha + params.beta);
  return set;
}

LinearSystem Augment(const LinearSystem& system, int copies) {
  if (copies < 1) {
    throw HopfError(ErrorCode::kInvalidArgument, "need at least one copy");
  }
  const Eigen::Index n = system.n();
  const Eigen::Index m = system.m();
  LinearSystem out;
  out.a = Matrix::Zero(copies * n, copies * n);
  out.b.resize(copies * n, m);
  for (int i = 0; i < copies; ++i) {
    out.a.block(i * n, i * n, n, n) = system.a;
    out.b.middleRows(i * n, n) = system.b;
  }
  out.q = system.q;
  return out;
}

Vector StackStates(const std::vector<Vector>& states) {
  if (states.empty()) return Vector();
  const Eigen::Index n = states.front().size();
  Vector out(n * static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].size() != n) {
      throw HopfError(ErrorCode::kDimensionMismatch, "states differ in size");
    }
    out.segment(static_cast<Eigen::Index>(i) * n, n) = states[i];
  }
  return out;
}

QuadraticTarget MseTarget(const std::vector<double>& weights, const Vector& goal,
                          double level) {
  if (goal.size() == 0 || goal.cwiseAbs().maxCoeff() != 0.0) {
    throw HopfError(ErrorCode::kNonOriginGoal,
                    "the mean-square target must be centered at the origin");
  }
  if (!(level > 0.0)) {
    throw HopfError(ErrorCode::kInvalidArgument, "level must be positive");
  }
  const Eigen::Index n = goal.size();
  const Eigen::Index k = static_cast<Eigen::Index>(weights.size());
  Matrix w = Matrix::Zero(k * n, k * n);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(weights[i] > 0.0)) {
      throw HopfError(ErrorCode::kNonPositiveWeight,
                      "mean weights must be strictly positive");
    }
    w.block(i * n, i * n, n, n).diagonal().setConstant(1.0 / weights[i]);
  }
  return QuadraticTarget(std::move(w), level);
}

}  // namespace hopf
