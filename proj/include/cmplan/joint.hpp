#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "cmplan/astar.hpp"
#include "cmplan/bucket_queue.hpp"
#include "cmplan/grid.hpp"
#include "cmplan/heuristic.hpp"
#include "cmplan/reservation.hpp"

namespace cmplan {

struct JointRobot {
  CellId start = kNoCell;
  CellId goal = kNoCell;
  const Heuristic* heuristic = nullptr;
  const RadiusConstraint* radius = nullptr;  // nullptr = unrestricted
};

struct JointResult {
  std::array<IdPath, 2> paths;  // each trimmed after its last move
  std::int64_t cost = 0;        // total moves (SUM) or finishing time (MAX)
  int finish = 0;
  int moves = 0;
  std::size_t expanded = 0;
};

/// Trims trailing waits: the robot parks on its last cell anyway.
inline IdPath trim_path(IdPath p) {
  while (p.size() > 1 && p[p.size() - 1] == p[p.size() - 2]) p.pop_back();
  return p;
}

/// A* over joint states (cell1, cell2, t) for two robots against a table that
/// holds everyone else. Both robots obey the move rules against the table and
/// against each other. SUM minimises total moves, MAX minimises the time at
/// which both are parked (then total moves).
inline std::optional<JointResult> joint_pair_search(const GridIndex& grid, const JointRobot& a,
                                                    const JointRobot& b,
                                                    const ReservationTable& table, Objective obj,
                                                    int t_max, std::size_t max_expansions = 0) {
  const bool sum = obj == Objective::Sum;
  std::vector<std::uint8_t> allowed_a;
  std::vector<std::uint8_t> allowed_b;
  auto mark = [&](const JointRobot& r, std::vector<std::uint8_t>& allowed) {
    if (!r.radius) return;
    allowed.assign(static_cast<std::size_t>(grid.size()), 0);
    for (CellId c : r.radius->allowed) allowed[static_cast<std::size_t>(c)] = 1;
  };
  mark(a, allowed_a);
  mark(b, allowed_b);
  auto ok_a = [&](CellId c) { return allowed_a.empty() || allowed_a[static_cast<std::size_t>(c)]; };
  auto ok_b = [&](CellId c) { return allowed_b.empty() || allowed_b[static_cast<std::size_t>(c)]; };

  if (a.start == b.start || a.goal == b.goal) return std::nullopt;
  if (!ok_a(a.start) || !ok_a(a.goal) || !ok_b(b.start) || !ok_b(b.goal)) return std::nullopt;
  if (table.occupant(0, a.start) != kNoRobot || table.occupant(0, b.start) != kNoRobot) {
    return std::nullopt;
  }
  const int free_a = table.last_busy(a.goal);
  const int free_b = table.last_busy(b.goal);
  if (free_a == kForever || free_b == kForever) return std::nullopt;

  const Heuristic& ha = *a.heuristic;
  const Heuristic& hb = *b.heuristic;
  auto estimate = [&](CellId ca, CellId cb, int t, int moves) -> std::int64_t {
    const std::int32_t x = ha(ca);
    const std::int32_t y = hb(cb);
    if (x == kUnreachable || y == kUnreachable) return -1;
    if (t + std::max(x, y) > t_max) return -1;
    return sum ? static_cast<std::int64_t>(moves) + x + y : static_cast<std::int64_t>(t) + std::max(x, y);
  };

  struct State {
    CellId ca, cb;
    int t;
    int moves;
    int parent;
    bool closed;
  };
  std::vector<State> states;
  std::unordered_map<std::uint64_t, int> index;
  auto key_of = [](CellId ca, CellId cb, int t) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ca)) << 40) ^
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cb)) << 16) ^
           static_cast<std::uint64_t>(t);
  };

  const std::int64_t f0 = estimate(a.start, b.start, 0, 0);
  if (f0 < 0) return std::nullopt;
  LayeredBucketQueue<int> queue;
  states.push_back({a.start, b.start, 0, 0, -1, false});
  index.emplace(key_of(a.start, b.start, 0), 0);
  queue.push(static_cast<std::size_t>(f0), 0, 0);

  const std::array<Direction, 5> dirs = {Direction::N, Direction::E, Direction::S, Direction::W,
                                         Direction::Wait};
  std::size_t expanded = 0;
  while (!queue.empty()) {
    const int si = queue.pop().item;
    if (states[static_cast<std::size_t>(si)].closed) continue;
    states[static_cast<std::size_t>(si)].closed = true;
    const State cur = states[static_cast<std::size_t>(si)];
    ++expanded;
    if (cur.ca == a.goal && cur.cb == b.goal && cur.t > free_a && cur.t > free_b) {
      JointResult r;
      r.finish = cur.t;
      r.moves = cur.moves;
      r.cost = sum ? cur.moves : cur.t;
      r.expanded = expanded;
      IdPath pa(static_cast<std::size_t>(cur.t) + 1);
      IdPath pb(static_cast<std::size_t>(cur.t) + 1);
      for (int s = si; s >= 0; s = states[static_cast<std::size_t>(s)].parent) {
        const State& st = states[static_cast<std::size_t>(s)];
        pa[static_cast<std::size_t>(st.t)] = st.ca;
        pb[static_cast<std::size_t>(st.t)] = st.cb;
      }
      r.paths = {trim_path(std::move(pa)), trim_path(std::move(pb))};
      if (!sum) {
        r.finish = static_cast<int>(std::max(r.paths[0].size(), r.paths[1].size())) - 1;
        r.cost = r.finish;
      }
      return r;
    }
    if (max_expansions && expanded >= max_expansions) return std::nullopt;
    if (cur.t >= t_max) continue;
    const int nt = cur.t + 1;
    for (Direction da : dirs) {
      const CellId na = grid.neighbor(cur.ca, da);
      if (!grid.passable(na) || !ok_a(na) || !table.step_legal(cur.ca, na, nt)) continue;
      for (Direction db : dirs) {
        const CellId nb = grid.neighbor(cur.cb, db);
        if (!grid.passable(nb) || !ok_b(nb) || !table.step_legal(cur.cb, nb, nt)) continue;
        if (na == nb) continue;
        // Entering the cell the partner just left requires moving the same way.
        if (na == cur.cb && da != db) continue;
        if (nb == cur.ca && da != db) continue;
        const int nmoves = cur.moves + (da != Direction::Wait) + (db != Direction::Wait);
        const std::int64_t f = estimate(na, nb, nt, nmoves);
        if (f < 0) continue;
        const std::uint64_t key = key_of(na, nb, nt);
        auto [it, inserted] = index.emplace(key, static_cast<int>(states.size()));
        if (inserted) {
          states.push_back({na, nb, nt, nmoves, si, false});
        } else {
          State& s = states[static_cast<std::size_t>(it->second)];
          if (s.closed || s.moves <= nmoves) continue;
          s.moves = nmoves;
          s.parent = si;
        }
        queue.push(static_cast<std::size_t>(f), static_cast<std::size_t>(nt), it->second);
      }
    }
  }
  return std::nullopt;
}

}  // namespace cmplan
