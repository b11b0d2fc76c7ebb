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

#include "hopf/grid_eval.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "hopf/csv.h"
#include "hopf/parallel.h"

namespace hopf {

std::size_t GridSpec::size() const {
  std::size_t total = resolution.empty() ? 0 : 1;
  for (int r : resolution) total *= static_cast<std::size_t>(std::max(r, 0));
  return total;
}

double ValueField::Coordinate(int axis, int index) const {
  const double lo = grid.lo[axis];
  const double hi = grid.hi[axis];
  const int res = grid.resolution[axis];
  if (index == res - 1) return hi;
  return lo + (hi - lo) * index / (res - 1);
}

Vector ValueField::Point(std::size_t flat_index) const {
  const int dims = static_cast<int>(grid.resolution.size());
  Vector point(dims);
  for (int axis = dims - 1; axis >= 0; --axis) {
    const auto res = static_cast<std::size_t>(grid.resolution[axis]);
    point(axis) = Coordinate(axis, static_cast<int>(flat_index % res));
    flat_index /= res;
  }
  return point;
}

bool ValueField::AllConverged() const {
  return std::all_of(converged.begin(), converged.end(),
                     [](std::uint8_t c) { return c != 0; });
}

double ValueField::MeanSolveMs() const {
  if (solve_ms.empty()) return 0.0;
  return std::accumulate(solve_ms.begin(), solve_ms.end(), 0.0) /
         static_cast<double>(solve_ms.size());
}

double ValueField::MeanIterations() const {
  if (iterations.empty()) return 0.0;
  return std::accumulate(iterations.begin(), iterations.end(), 0.0) /
         static_cast<double>(iterations.size());
}

ValueField SolveGrid(const HopfProblem& problem, double horizon,
                     const GridSpec& grid, const SolverConfig& config,
                     int workers) {
  const auto dims = static_cast<std::size_t>(problem.system.n());
  if (grid.lo.size() != dims || grid.hi.size() != dims ||
      grid.resolution.size() != dims) {
    throw HopfError(ErrorCode::kDimensionMismatch,
                    "grid dimension must match the state dimension");
  }
  for (std::size_t a = 0; a < dims; ++a) {
    if (grid.resolution[a] < 2) {
      throw HopfError(ErrorCode::kInvalidArgument,
                      "grid resolution must be >= 2 on every axis");
    }
    if (!(grid.hi[a] > grid.lo[a])) {
      throw HopfError(ErrorCode::kInvalidArgument,
                      "grid bounds must satisfy lo < hi");
    }
  }

  const HopfEvaluator evaluator(problem, horizon, config);
  ValueField field;
  field.grid = grid;
  field.horizon = horizon;
  const std::size_t count = grid.size();
  field.values.resize(count);
  field.converged.resize(count);
  field.iterations.resize(count);
  field.solve_ms.resize(count);

  ParallelFor(count, workers, [&](std::size_t i) {
    const Vector z0 = field.Point(i);
    const auto start = std::chrono::steady_clock::now();
    const HopfSolution sol = evaluator.Solve(z0);
    const auto stop = std::chrono::steady_clock::now();
    field.values[i] = sol.value;
    field.converged[i] = sol.converged ? 1 : 0;
    field.iterations[i] = sol.iterations;
    field.solve_ms[i] =
        std::chrono::duration<double, std::milli>(stop - start).count();
  });
  return field;
}

namespace {

// Edge ids: 2 * node + 0 joins node (i, j) to (i + 1, j); 2 * node + 1 joins
// (i, j) to (i, j + 1).
struct Crossing {
  Point2 point;
  std::vector<std::size_t> segments;
};

}  // namespace

std::vector<Polyline> ZeroContour(const ValueField& field) {
  if (field.grid.resolution.size() != 2) {
    throw HopfError(ErrorCode::kNotTwoDimensional,
                    "contours need a two-dimensional field");
  }
  const int nx = field.grid.resolution[0];
  const int ny = field.grid.resolution[1];
  auto node = [ny](int i, int j) {
    return static_cast<std::size_t>(i) * ny + j;
  };
  auto value = [&](int i, int j) { return field.values[node(i, j)]; };

  std::map<std::size_t, Crossing> crossings;
  std::vector<std::array<std::size_t, 2>> segments;

  auto crossing_on = [&](std::size_t edge) -> std::size_t {
    auto it = crossings.find(edge);
    if (it == crossings.end()) {
      const std::size_t base = edge / 2;
      const int i = static_cast<int>(base / ny);
      const int j = static_cast<int>(base % ny);
      const int i2 = (edge % 2 == 0) ? i + 1 : i;
      const int j2 = (edge % 2 == 0) ? j : j + 1;
      const double va = value(i, j);
      const double vb = value(i2, j2);
      const double t = va / (va - vb);
      const Point2 a{field.Coordinate(0, i), field.Coordinate(1, j)};
      const Point2 b{field.Coordinate(0, i2), field.Coordinate(1, j2)};
      crossings.emplace(edge,
                        Crossing{{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}, {}});
    }
    return edge;
  };
  auto add_segment = [&](std::size_t e1, std::size_t e2) {
    crossing_on(e1);
    crossing_on(e2);
    crossings[e1].segments.push_back(segments.size());
    crossings[e2].segments.push_back(segments.size());
    segments.push_back({e1, e2});
  };

  for (int i = 0; i + 1 < nx; ++i) {
    for (int j = 0; j + 1 < ny; ++j) {
      // Corners counter-clockwise from (i, j), each with its two edges.
      const std::array<double, 4> v = {value(i, j), value(i + 1, j),
                                       value(i + 1, j + 1), value(i, j + 1)};
      const std::array<std::size_t, 4> edges = {
          2 * node(i, j),          // bottom: (i,j)-(i+1,j)
          2 * node(i + 1, j) + 1,  // right: (i+1,j)-(i+1,j+1)
          2 * node(i, j + 1),      // top: (i,j+1)-(i+1,j+1)
          2 * node(i, j) + 1};     // left: (i,j)-(i,j+1)
      std::array<bool, 4> inside{};
      int count = 0;
      for (int c = 0; c < 4; ++c) {
        inside[c] = v[c] < 0.0;
        count += inside[c];
      }
      if (count == 0 || count == 4) continue;

      // Corner c touches edges c (towards c + 1) and c - 1 (from c - 1).
      std::vector<std::size_t> cut;
      for (int e = 0; e < 4; ++e) {
        if (inside[e] != inside[(e + 1) % 4]) cut.push_back(edges[e]);
      }
      if (cut.size() == 2) {
        add_segment(cut[0], cut[1]);
        continue;
      }
      // Saddle: isolate the corners whose sign differs from the center.
      const bool center_inside = (v[0] + v[1] + v[2] + v[3]) / 4.0 < 0.0;
      for (int c = 0; c < 4; ++c) {
        if (inside[c] != center_inside) {
          add_segment(edges[(c + 3) % 4], edges[c]);
        }
      }
    }
  }

  std::vector<bool> used(segments.size(), false);
  std::vector<Polyline> out;
  auto walk = [&](std::size_t start_edge) {
    Polyline line;
    line.push_back(crossings[start_edge].point);
    std::size_t edge = start_edge;
    while (true) {
      std::size_t next_segment = segments.size();
      for (std::size_t s : crossings[edge].segments) {
        if (!used[s]) {
          next_segment = s;
          break;
        }
      }
      if (next_segment == segments.size()) break;
      used[next_segment] = true;
      const auto& seg = segments[next_segment];
      edge = seg[0] == edge ? seg[1] : seg[0];
      line.push_back(crossings[edge].point);
    }
    out.push_back(std::move(line));
  };
  // Open polylines start at boundary crossings (one incident segment).
  for (auto& [edge, crossing] : crossings) {
    if (crossing.segments.size() == 1 && !used[crossing.segments[0]]) {
      walk(edge);
    }
  }
  for (auto& [edge, crossing] : crossings) {
    for (std::size_t s : crossing.segments) {
      if (!used[s]) {
        walk(edge);
        break;
      }
    }
  }
  return out;
}

double Interpolate(const ValueField& field, const Point2& point) {
  if (field.grid.resolution.size() != 2) {
    throw HopfError(ErrorCode::kNotTwoDimensional,
                    "interpolation needs a two-dimensional field");
  }
  const int nx = field.grid.resolution[0];
  const int ny = field.grid.resolution[1];
  auto locate = [&](int axis, double x, int res, int& cell, double& frac) {
    const double lo = field.grid.lo[axis];
    const double hi = field.grid.hi[axis];
    const double u = std::clamp((x - lo) / (hi - lo), 0.0, 1.0) * (res - 1);
    cell = std::min(static_cast<int>(std::floor(u)), res - 2);
    frac = u - cell;
  };
  int i = 0, j = 0;
  double fx = 0.0, fy = 0.0;
  locate(0, point.x, nx, i, fx);
  locate(1, point.y, ny, j, fy);
  auto v = [&](int a, int b) {
    return field.values[static_cast<std::size_t>(a) * ny + b];
  };
  return (1 - fx) * (1 - fy) * v(i, j) + fx * (1 - fy) * v(i + 1, j) +
         fx * fy * v(i + 1, j + 1) + (1 - fx) * fy * v(i, j + 1);
}

double DistanceToContour(const std::vector<Polyline>& contours,
                         const Point2& point) {
  double best = std::numeric_limits<double>::infinity();
  for (const Polyline& line : contours) {
    for (std::size_t k = 0; k < line.size(); ++k) {
      const Point2& a = line[k];
      const Point2& b = k + 1 < line.size() ? line[k + 1] : line[k];
      const double dx = b.x - a.x;
      const double dy = b.y - a.y;
      const double len2 = dx * dx + dy * dy;
      double t = 0.0;
      if (len2 > 0.0) {
        t = std::clamp(((point.x - a.x) * dx + (point.y - a.y) * dy) / len2,
                       0.0, 1.0);
      }
      best = std::min(best, std::hypot(a.x + t * dx - point.x,
                                       a.y + t * dy - point.y));
    }
  }
  return best;
}

void WriteFieldCsv(std::ostream& os, const ValueField& field) {
  const std::size_t dims = field.grid.resolution.size();
  const std::size_t count = field.grid.size();
  if (field.values.size() != count || field.converged.size() != count ||
      field.iterations.size() != count) {
    throw HopfError(ErrorCode::kDimensionMismatch,
                    "field arrays do not match the grid size");
  }
  os << "# horizon=" << FormatNumber(field.horizon) << '\n';
  for (std::size_t a = 0; a < dims; ++a) {
    os << "# axis_" << a + 1 << "=" << FormatNumber(field.grid.lo[a]) << ','
       << FormatNumber(field.grid.hi[a]) << ',' << field.grid.resolution[a]
       << '\n';
  }
  os << "# order=row-major, first axis slowest\n";
  os << "# mean_solve_ms=" << FormatNumber(field.MeanSolveMs()) << '\n';
  for (std::size_t a = 0; a < dims; ++a) os << "x_" << a + 1 << ',';
  os << "value,converged,iterations\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Vector p = field.Point(i);
    for (std::size_t a = 0; a < dims; ++a) os << FormatNumber(p(a)) << ',';
    os << FormatNumber(field.values[i]) << ',' << int{field.converged[i]} << ','
       << field.iterations[i] << '\n';
  }
}

void WriteContourCsv(std::ostream& os, const std::vector<Polyline>& contours,
                     double horizon) {
  os << "# horizon=" << FormatNumber(horizon) << '\n';
  os << "polyline,vertex,x_1,x_2\n";
  for (std::size_t l = 0; l < contours.size(); ++l) {
    for (std::size_t k = 0; k < contours[l].size(); ++k) {
      os << l << ',' << k << ',' << FormatNumber(contours[l][k].x) << ','
         << FormatNumber(contours[l][k].y) << '\n';
    }
  }
}

}  // namespace hopf
