#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "cmplan/grid.hpp"
#include "cmplan/instance.hpp"

namespace cmplan {

inline constexpr std::int64_t kInfCost = std::numeric_limits<std::int64_t>::max() / 4;

/// Which distances make up the cost of parking a robot at a candidate.
enum class CostMode { Sum, StartOnly, TargetOnly };

inline std::string_view to_string(CostMode m) {
  switch (m) {
    case CostMode::Sum: return "sum";
    case CostMode::StartOnly: return "start";
    case CostMode::TargetOnly: return "target";
  }
  return "?";
}

inline CostMode parse_cost_mode(std::string_view s) {
  if (s == "sum") return CostMode::Sum;
  if (s == "start") return CostMode::StartOnly;
  if (s == "target") return CostMode::TargetOnly;
  throw Error("unknown cost mode '" + std::string(s) + "'");
}

/// Dense robots x candidates cost matrix; kInfCost marks unreachable pairs.
struct AssignmentProblem {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> cost;

  AssignmentProblem() = default;
  AssignmentProblem(std::size_t r, std::size_t c) : rows(r), cols(c), cost(r * c, kInfCost) {}

  std::int64_t& at(std::size_t r, std::size_t c) { return cost[r * cols + c]; }
  [[nodiscard]] std::int64_t at(std::size_t r, std::size_t c) const { return cost[r * cols + c]; }
};

/// cost[r][c] = dist(start_r, c) + dist(c, target_r) over obstacle-only BFS.
/// Throws when some robot reaches no candidate.
inline AssignmentProblem build_costs(const GridIndex& grid, const Instance& inst,
                                     const std::vector<Cell>& candidates,
                                     CostMode mode = CostMode::Sum) {
  const std::size_t n = inst.num_robots();
  AssignmentProblem p(n, candidates.size());
  std::vector<CellId> cand_ids;
  cand_ids.reserve(candidates.size());
  for (const Cell& c : candidates) {
    const CellId id = grid.find(c);
    if (id == kNoCell) throw Error("filler candidate outside the grid window");
    cand_ids.push_back(id);
  }
  for (std::size_t r = 0; r < n; ++r) {
    DistanceField from_start;
    DistanceField from_target;
    if (mode != CostMode::TargetOnly) from_start = bfs_field(grid, inst.starts[r]);
    if (mode != CostMode::StartOnly) from_target = bfs_field(grid, inst.targets[r]);
    bool any = false;
    for (std::size_t c = 0; c < cand_ids.size(); ++c) {
      std::int64_t total = 0;
      bool finite = true;
      if (!from_start.empty()) {
        finite = finite && from_start.reachable(cand_ids[c]);
        total += finite ? from_start[cand_ids[c]] : 0;
      }
      if (!from_target.empty()) {
        finite = finite && from_target.reachable(cand_ids[c]);
        total += finite ? from_target[cand_ids[c]] : 0;
      }
      if (finite) {
        p.at(r, c) = total;
        any = true;
      }
    }
    if (!any) {
      throw Error("robot " + std::to_string(r) +
                  " reaches no intermediate candidate; generate more candidates");
    }
  }
  return p;
}

/// Rectangular min-cost assignment (rows <= cols) by successive shortest paths
/// with vertex potentials. Each phase adds one row and augments along a
/// Dijkstra shortest path on reduced costs. Ties pick the lowest column index.
/// Returns the column assigned to every row.
inline std::vector<std::size_t> min_cost_assign(const AssignmentProblem& p) {
  const std::size_t n = p.rows;
  const std::size_t m = p.cols;
  if (n == 0) return {};
  if (n > m) throw Error("assignment needs at least as many candidates as robots");

  // 1-based arrays; column 0 is the virtual source of the current phase.
  std::vector<std::int64_t> row_pot(n + 1, 0);
  std::vector<std::int64_t> col_pot(m + 1, 0);
  std::vector<std::size_t> col_row(m + 1, 0);  // row matched to each column, 0 = free
  std::vector<std::size_t> parent(m + 1, 0);
  std::vector<std::int64_t> dist(m + 1);
  std::vector<char> done(m + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    col_row[0] = i;
    std::size_t j0 = 0;
    std::fill(dist.begin(), dist.end(), kInfCost);
    std::fill(done.begin(), done.end(), 0);
    do {
      done[j0] = 1;
      const std::size_t i0 = col_row[j0];
      std::int64_t delta = kInfCost;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (done[j]) continue;
        const std::int64_t c = p.at(i0 - 1, j - 1);
        if (c < kInfCost) {
          const std::int64_t reduced = c - row_pot[i0] - col_pot[j];
          if (reduced < dist[j]) {
            dist[j] = reduced;
            parent[j] = j0;
          }
        }
        if (dist[j] < delta) {
          delta = dist[j];
          j1 = j;
        }
      }
      if (j1 == 0) throw Error("assignment problem is infeasible");
      for (std::size_t j = 0; j <= m; ++j) {
        if (done[j]) {
          row_pot[col_row[j]] += delta;
          col_pot[j] -= delta;
        } else if (dist[j] < kInfCost) {
          dist[j] -= delta;
        }
      }
      j0 = j1;
    } while (col_row[j0] != 0);
    do {
      const std::size_t j1 = parent[j0];
      col_row[j0] = col_row[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= m; ++j) {
    if (col_row[j] != 0) assignment[col_row[j] - 1] = j - 1;
  }
  return assignment;
}

inline std::int64_t assignment_cost(const AssignmentProblem& p, const std::vector<std::size_t>& a) {
  std::int64_t total = 0;
  for (std::size_t r = 0; r < a.size(); ++r) total += p.at(r, a[r]);
  return total;
}

}  // namespace cmplan
