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

#include "hopf/time_optimal.h"

#include <cmath>
#include <sstream>

namespace hopf {

double HamiltonianX(const Eigen::Ref<const Vector>& p,
                    const Eigen::Ref<const Vector>& z0,
                    const LinearSystem& system, const ControlSet& set) {
  if (p.size() != system.n() || z0.size() != system.n()) {
    throw HopfError(ErrorCode::kDimensionMismatch,
                    "HamiltonianX arguments do not match the state dimension");
  }
  const Vector drift = system.a * z0;
  const Vector input = -(system.q.transpose() * (system.b.transpose() * p));
  return -drift.dot(p) + Support(set, input);
}

namespace {

struct Sample {
  double horizon;
  HopfSolution solution;
};

}  // namespace

MinTimeResult MinTime(const Vector& x0, double t_lo, double t_hi,
                      const HopfProblem& problem, const SolverConfig& config,
                      const MinTimeOptions& options) {
  if (!(t_lo >= 0.0) || !(t_hi > t_lo)) {
    throw HopfError(ErrorCode::kInvalidArgument,
                    "min-time bracket needs 0 <= t_lo < t_hi");
  }
  MinTimeResult result;
  auto evaluate = [&](double t, const std::optional<Vector>& warm) {
    Sample s{t, HopfEvaluator(problem, t, config).Solve(x0, warm)};
    const double hx =
        HamiltonianX(s.solution.minimizer, x0, problem.system, problem.control_set);
    result.history.push_back({t, s.solution.value, hx, false});
    return s;
  };
  auto finish = [&](const Sample& s, double lo, double hi) {
    result.t_star = s.horizon;
    result.solution = s.solution;
    result.t_lo = lo;
    result.t_hi = hi;
    return result;
  };

  Sample lo = evaluate(t_lo, std::nullopt);
  if (lo.solution.value <= 0.0) {
    if (t_lo <= HopfEvaluator::kShortHorizon) return finish(lo, t_lo, t_lo);
    std::ostringstream msg;
    msg << "phi(x0, " << t_lo << ") = " << lo.solution.value
        << " <= 0; the target is reached before t_lo";
    throw HopfError(ErrorCode::kNoSignChange, msg.str());
  }
  Sample hi = evaluate(t_hi, lo.solution.minimizer);
  if (hi.solution.value > 0.0) {
    std::ostringstream msg;
    msg << "phi(x0, " << t_lo << ") = " << lo.solution.value << ", phi(x0, "
        << t_hi << ") = " << hi.solution.value
        << "; the target is not reachable within t_hi";
    throw HopfError(ErrorCode::kNoSignChange, msg.str());
  }
  if (std::abs(hi.solution.value) <= options.value_tol) {
    return finish(hi, lo.horizon, hi.horizon);
  }

  Sample current = hi;
  for (int outer = 0; outer < options.max_outer_iter; ++outer) {
    const double hx = result.history.back().hamiltonian;
    double next = 0.5 * (lo.horizon + hi.horizon);
    bool newton = false;
    if (hx > options.h_min) {
      const double candidate = current.horizon + current.solution.value / hx;
      if (candidate > lo.horizon && candidate < hi.horizon) {
        next = candidate;
        newton = true;
      }
    }
    if (newton) {
      ++result.newton_steps;
    } else {
      ++result.bisection_steps;
    }

    Sample s = evaluate(next, current.solution.minimizer);
    result.history.back().newton = newton;
    if (s.solution.value > 0.0) {
      lo = s;
    } else {
      hi = s;
    }
    if (std::abs(s.solution.value) <= options.value_tol) {
      return finish(s, lo.horizon, hi.horizon);
    }
    if (hi.horizon - lo.horizon <= options.time_tol) {
      return finish(hi, lo.horizon, hi.horizon);
    }
    current = std::move(s);
  }
  throw HopfError(ErrorCode::kMaxOuterIter,
                  "minimum-time search did not meet its tolerances");
}

}  // namespace hopf
