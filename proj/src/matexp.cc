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

#include "hopf/matexp.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/LU>

namespace hopf {
namespace {

double OneNorm(const Matrix& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

void CheckFinite(const Matrix& a, double t) {
  if (!std::isfinite(t) || !a.allFinite()) {
    throw HopfError(ErrorCode::kNonFinite, "matrix exponential input");
  }
}

// Pade numerator/denominator pieces: r(A) = (V - U)^{-1} (V + U).
template <std::size_t N>
void PadeLowDegree(const Matrix& a, const std::array<double, N>& b, Matrix& u,
                   Matrix& v) {
  const Eigen::Index n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix power = ident;
  Matrix odd = Matrix::Zero(n, n);
  v = Matrix::Zero(n, n);
  for (std::size_t j = 0; j + 1 < N; j += 2) {
    v += b[j] * power;
    odd += b[j + 1] * power;
    power = power * a2;
  }
  u.noalias() = a * odd;
}

void Pade13(const Matrix& a, Matrix& u, Matrix& v) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  const Eigen::Index n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  Matrix tmp = b[13] * a6 + b[11] * a4 + b[9] * a2;
  Matrix inner = a6 * tmp;
  inner += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident;
  u.noalias() = a * inner;
  tmp = b[12] * a6 + b[10] * a4 + b[8] * a2;
  v.noalias() = a6 * tmp;
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
}

Matrix ExpmDense(const Matrix& a, double t) {
  const Eigen::Index n = a.rows();
  const Matrix ta = t * a;
  const double norm = OneNorm(ta);
  Matrix u(n, n), v(n, n);
  int squarings = 0;

  // Thresholds for degrees 3, 5, 7, 9 and 13 (backward error below unit
  // roundoff in double precision).
  if (norm <= 1.495585217958292e-2) {
    PadeLowDegree(ta, std::array<double, 4>{120.0, 60.0, 12.0, 1.0}, u, v);
  } else if (norm <= 2.539398330063230e-1) {
    PadeLowDegree(ta,
                  std::array<double, 6>{30240.0, 15120.0, 3360.0, 420.0, 30.0,
                                        1.0},
                  u, v);
  } else if (norm <= 9.504178996162932e-1) {
    PadeLowDegree(ta,
                  std::array<double, 8>{17297280.0, 8648640.0, 1995840.0,
                                        277200.0, 25200.0, 1512.0, 56.0, 1.0},
                  u, v);
  } else if (norm <= 2.097847961257068) {
    PadeLowDegree(ta,
                  std::array<double, 10>{17643225600.0, 8821612800.0,
                                         2075673600.0, 302702400.0, 30270240.0,
                                         2162160.0, 110880.0, 3960.0, 90.0,
                                         1.0},
                  u, v);
  } else {
    constexpr double kTheta13 = 5.371920351148152;
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
    Pade13(ta / std::ldexp(1.0, squarings), u, v);
  }

  Matrix result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  if (!result.allFinite()) {
    throw HopfError(ErrorCode::kNonFinite, "matrix exponential overflowed");
  }
  return result;
}

// Groups of indices coupled through the sparsity pattern of A (connected
// components of the graph with an edge wherever a_ij or a_ji is non-zero).
std::vector<std::vector<Eigen::Index>> CoupledGroups(const Matrix& a) {
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> parent(n);
  for (Eigen::Index i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j && a(i, j) != 0.0) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<Eigen::Index> slot(n, -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Eigen::Index>(groups.size());
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

}  // namespace

Matrix Expm(const Matrix& a, double t) {
  CheckFinite(a, t);
  if (a.rows() != a.cols()) {
    throw HopfError(ErrorCode::kDimensionMismatch, "Expm needs a square matrix");
  }
  const Eigen::Index n = a.rows();
  if (t == 0.0 || n == 0) return Matrix::Identity(n, n);
  if (n < 8) return ExpmDense(a, t);

  // Decoupled diagonal blocks exponentiate independently; repeated blocks
  // (augmented systems) are computed once.
  const auto groups = CoupledGroups(a);
  if (groups.size() == 1) return ExpmDense(a, t);
  Matrix result = Matrix::Zero(n, n);
  std::vector<std::pair<Matrix, Matrix>> done;  // (block, exponential)
  for (const auto& g : groups) {
    const Eigen::Index k = static_cast<Eigen::Index>(g.size());
    Matrix block(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) block(i, j) = a(g[i], g[j]);
    }
    const Matrix* e = nullptr;
    for (const auto& [seen, exp] : done) {
      if (seen.rows() == k && seen == block) e = &exp;
    }
    if (!e) {
      done.emplace_back(block, ExpmDense(block, t));
      e = &done.back().second;
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) result(g[i], g[j]) = (*e)(i, j);
    }
  }
  return result;
}

Matrix ExpmAction(const Matrix& a, double t, const Matrix& m) {
  CheckFinite(a, t);
  if (!m.allFinite()) {
    throw HopfError(ErrorCode::kNonFinite, "matrix exponential action operand");
  }
  if (a.rows() != a.cols() || a.cols() != m.rows()) {
    throw HopfError(ErrorCode::kDimensionMismatch,
                    "ExpmAction operand does not match A");
  }
  const Eigen::Index n = a.rows();
  if (t == 0.0 || n == 0) return m;
  if (4 * m.cols() > n) return Expm(a, t) * m;

  // Shift by the mean eigenvalue, then split [0, t] into s steps with
  // ||t (A - mu I) / s||_1 <= 1 so each truncated Taylor series converges
  // quickly.
  const double mu = a.trace() / static_cast<double>(n);
  Matrix shifted = a;
  shifted.diagonal().array() -= mu;
  const double norm = std::abs(t) * OneNorm(shifted);
  const int steps = std::max(1, static_cast<int>(std::ceil(norm)));
  const double h = t / steps;
  const double eta = std::exp(mu * h);
  constexpr double kTol = std::numeric_limits<double>::epsilon() / 2;
  constexpr int kMaxTerms = 60;

  Matrix f = m;
  Matrix term(n, m.cols());
  Matrix next(n, m.cols());
  for (int s = 0; s < steps; ++s) {
    term = f;
    double c1 = term.lpNorm<Eigen::Infinity>();
    for (int k = 1; k <= kMaxTerms; ++k) {
      next.noalias() = shifted * term;
      term = next * (h / k);
      const double c2 = term.lpNorm<Eigen::Infinity>();
      f += term;
      if (c1 + c2 <= kTol * f.lpNorm<Eigen::Infinity>()) break;
      c1 = c2;
    }
    f *= eta;
  }
  if (!f.allFinite()) {
    throw HopfError(ErrorCode::kNonFinite, "matrix exponential action overflowed");
  }
  return f;
}

double OperatorNorm(const Matrix& k, double tol, int max_iter) {
  const Eigen::Index n = k.cols();
  if (n == 0 || k.rows() == 0) return 0.0;
  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  Vector kv(k.rows());
  Vector w(n);
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    kv.noalias() = k * v;
    w.noalias() = k.transpose() * kv;
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    const bool done = std::abs(next - lambda) <= tol * next;
    lambda = next;
    if (done) break;
  }
  return std::sqrt(lambda);
}

StackedOperator AssembleStack(const HopfProblem& problem, double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw HopfError(ErrorCode::kHorizonNonPositive,
                    "horizon must be positive and finite");
  }
  const LinearSystem& sys = problem.system;
  const int n_quad = problem.quadrature_n;
  const Eigen::Index n = sys.n();
  const Eigen::Index m = sys.m();
  const bool trapezoid = problem.quadrature_rule == QuadratureRule::kTrapezoid;
  const int blocks = trapezoid ? n_quad + 1 : n_quad;

  StackedOperator stack;
  stack.horizon = horizon;
  stack.delta_t = horizon / n_quad;
  stack.block_rows = m;
  stack.k.resize(blocks * m, n);
  stack.times.resize(blocks);
  stack.weights.assign(blocks, stack.delta_t);
  if (trapezoid) {
    stack.weights.front() *= 0.5;
    stack.weights.back() *= 0.5;
  }

  // Block i needs e^{-s A} B Q at s = T - t_i = (N - i) dt, a uniform grid
  // in s. March from s = 0 with the one-step propagator e^{-dt A}.
  const Matrix step = Expm(sys.a, -stack.delta_t);
  Matrix current = sys.b * sys.q;
  for (int j = 0; j <= n_quad; ++j) {
    if (j > 0) current = step * current;
    const int i = n_quad - j;  // t_i = i dt
    if (i >= blocks) continue;  // s = 0 is only sampled by the trapezoid rule
    stack.times[i] = i * stack.delta_t;
    stack.k.middleRows(static_cast<Eigen::Index>(i) * m, m) =
        -current.transpose();
  }
  stack.norm_estimate = OperatorNorm(stack.k);
  return stack;
}

}  // namespace hopf
