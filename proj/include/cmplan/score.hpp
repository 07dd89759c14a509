#pragma once

#include <algorithm>
#include <cstdint>

#include "cmplan/grid.hpp"
#include "cmplan/instance.hpp"
#include "cmplan/solution.hpp"
#include "cmplan/validate.hpp"

namespace cmplan {

/// Total number of position-changing moves.
inline std::int64_t total_moves(const Solution& s) {
  std::int64_t moves = 0;
  for (const Path& p : s.paths()) {
    for (std::size_t t = 1; t < p.size(); ++t) moves += (p[t] != p[t - 1]) ? 1 : 0;
  }
  return moves;
}

/// Number of steps after trimming trailing all-wait steps.
inline std::int64_t makespan(const Solution& s) {
  std::int64_t last = 0;
  for (const Path& p : s.paths()) {
    for (std::size_t t = p.size(); t-- > 1;) {
      if (p[t] != p[t - 1]) {
        last = std::max<std::int64_t>(last, static_cast<std::int64_t>(t));
        break;
      }
    }
  }
  return last;
}

inline std::int64_t score_unchecked(const Solution& s, Objective obj) {
  return obj == Objective::Sum ? total_moves(s) : makespan(s);
}

/// Objective value of a valid solution; throws on an invalid one.
inline std::int64_t score(const Instance& inst, const Solution& s, Objective obj) {
  const ValidationReport report = validate(inst, s);
  if (!report.ok()) {
    throw Error("cannot score an invalid solution: " + format_violation(report.violations.front()));
  }
  return score_unchecked(s, obj);
}

struct LowerBounds {
  std::int64_t sum = 0;
  std::int64_t max = 0;

  [[nodiscard]] std::int64_t get(Objective obj) const { return obj == Objective::Sum ? sum : max; }
};

/// Obstacle-only shortest-path distances: summed for SUM, maximised for MAX.
/// A one-cell margin around the instance keeps BFS distances exact.
inline LowerBounds lower_bounds(const Instance& inst) {
  const GridIndex grid = GridIndex::covering(inst, {}, 2);
  LowerBounds lb;
  for (std::size_t r = 0; r < inst.num_robots(); ++r) {
    const DistanceField field = bfs_field(grid, inst.targets[r]);
    const std::int32_t d = field.at(grid, inst.starts[r]);
    if (d == kUnreachable) {
      throw Error("robot " + std::to_string(r) + " cannot reach its target");
    }
    lb.sum += d;
    lb.max = std::max<std::int64_t>(lb.max, d);
  }
  return lb;
}

inline std::int64_t lower_bound(const Instance& inst, Objective obj) {
  return lower_bounds(inst).get(obj);
}

}  // namespace cmplan
