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

#ifndef HOPF_GRID_EVAL_H_
#define HOPF_GRID_EVAL_H_

#include <cstdint>
#include <ostream>
#include <vector>

#include "hopf/hopf_solver.h"

namespace hopf {

/// Axis-aligned grid with inclusive endpoints, `resolution[a]` >= 2 points on
/// axis a.
struct GridSpec {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<int> resolution;

  std::size_t size() const;
};

/**
 * @brief phi(., T) sampled on a GridSpec.
 *
 * Row-major storage, first axis slowest: on a 2-D grid the value at axis
 * indices (i, j) lives at i * resolution[1] + j.
 */
struct ValueField {
  GridSpec grid;
  double horizon = 0.0;
  std::vector<double> values;
  std::vector<std::uint8_t> converged;
  std::vector<int> iterations;
  std::vector<double> solve_ms;  ///< wall time of each point's Hopf solve

  std::size_t size() const { return values.size(); }
  double Coordinate(int axis, int index) const;
  Vector Point(std::size_t flat_index) const;
  bool AllConverged() const;
  double MeanSolveMs() const;
  double MeanIterations() const;
};

/// Independent Hopf solve at every grid point. The result is identical for
/// any worker count (0 selects the hardware concurrency).
ValueField SolveGrid(const HopfProblem& problem, double horizon,
                     const GridSpec& grid, const SolverConfig& config,
                     int workers = 0);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};
using Polyline = std::vector<Point2>;

/**
 * @brief Marching-squares polylines of the zero level set of a 2-D field.
 *
 * Crossings are linearly interpolated along cell edges; a corner counts as
 * inside when its value is negative. Ambiguous saddle cells are resolved by
 * the sign of the mean of the four corners. Closed loops repeat their first
 * vertex at the end. Throws kNotTwoDimensional for other dimensions.
 */
std::vector<Polyline> ZeroContour(const ValueField& field);

/// Bilinear interpolation of a 2-D field; points outside are clamped.
double Interpolate(const ValueField& field, const Point2& point);

/// Smallest distance from a point to any segment of the polylines.
double DistanceToContour(const std::vector<Polyline>& contours,
                         const Point2& point);

/// Metadata lines (# ...), header `x_1..x_n,value,converged,iterations`, rows.
void WriteFieldCsv(std::ostream& os, const ValueField& field);

/// Header `polyline,vertex,x_1,x_2`, one row per vertex.
void WriteContourCsv(std::ostream& os, const std::vector<Polyline>& contours,
                     double horizon);

}  // namespace hopf

#endif  // HOPF_GRID_EVAL_H_
