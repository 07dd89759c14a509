#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "cmplan/bucket_queue.hpp"
#include "cmplan/grid.hpp"
#include "cmplan/heuristic.hpp"
#include "cmplan/reservation.hpp"

namespace cmplan {

struct RelaxedResult {
  IdPath path;
  std::vector<RobotId> violated;  // sorted, each robot once
  int arrival = 0;
  int moves = 0;
};

/// Earliest-arrival path that may pass through up to `budget` registered
/// robots. Any conflict with a robot (shared cell, illegal train, or occupying
/// the goal after arrival) adds it to the violated set; conflicts with robots
/// already in the set are free. Ties on arrival prefer fewer violated robots,
/// then fewer moves.
inline std::optional<RelaxedResult> relaxed_path(const GridIndex& grid, CellId start, CellId goal,
                                                 const ReservationTable& table, const Heuristic& h,
                                                 int budget, int t_max) {
  if (budget < 0 || !grid.passable(start) || !grid.passable(goal)) return std::nullopt;

  struct State {
    CellId cell;
    int t;
    int set;
    int moves;
    int parent;
    bool closed;
  };
  std::vector<State> states;
  std::vector<std::vector<RobotId>> sets{{}};
  std::map<std::vector<RobotId>, int> set_index{{{}, 0}};
  std::unordered_map<std::uint64_t, int> index;

  auto intern = [&](std::vector<RobotId> s) {
    auto [it, inserted] = set_index.emplace(s, static_cast<int>(sets.size()));
    if (inserted) sets.push_back(std::move(s));
    return it->second;
  };
  auto key_of = [](CellId c, int t, int set) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c)) << 38) ^
           (static_cast<std::uint64_t>(t) << 22) ^ static_cast<std::uint64_t>(set);
  };
  auto contains = [](const std::vector<RobotId>& s, RobotId r) {
    return std::binary_search(s.begin(), s.end(), r);
  };

  // Robots occupying the goal strictly after time t, for every t up to the horizon.
  const int horizon = table.horizon();
  std::vector<std::vector<RobotId>> after(static_cast<std::size_t>(horizon) + 1);
  {
    std::vector<RobotId> acc;
    const RobotId parked = table.occupant(horizon, goal);
    if (parked != kNoRobot) acc.push_back(parked);
    for (int t = horizon; t >= 0; --t) {
      after[static_cast<std::size_t>(t)] = acc;
      const RobotId occ = table.occupant(t, goal);
      if (occ != kNoRobot && !contains(acc, occ)) {
        acc.insert(std::lower_bound(acc.begin(), acc.end(), occ), occ);
      }
    }
  }
  auto parking_conflicts = [&](int t) -> const std::vector<RobotId>& {
    return after[static_cast<std::size_t>(std::min(t, horizon))];
  };

  std::vector<RobotId> start_conf;
  if (RobotId q = table.occupant(0, start); q != kNoRobot) start_conf.push_back(q);
  if (static_cast<int>(start_conf.size()) > budget) return std::nullopt;
  const std::int32_t h0 = h(start);
  if (h0 == kUnreachable || h0 > t_max) return std::nullopt;

  LayeredBucketQueue<int> queue;
  const int start_set = intern(start_conf);
  states.push_back({start, 0, start_set, 0, -1, false});
  index.emplace(key_of(start, 0, start_set), 0);
  queue.push(static_cast<std::size_t>(h0), 0, 0);

  const std::array<Direction, 5> order = {Direction::N, Direction::E, Direction::S, Direction::W,
                                          Direction::Wait};
  int best = -1;
  std::vector<RobotId> best_set;
  int best_t = -1;

  while (!queue.empty()) {
    if (best >= 0) {
      auto [f, t] = queue.peek_key();
      if (static_cast<int>(f) != best_t || static_cast<int>(t) != best_t) break;
    }
    auto popped = queue.pop();
    const int si = popped.item;
    if (states[static_cast<std::size_t>(si)].closed) continue;
    states[static_cast<std::size_t>(si)].closed = true;
    const State cur = states[static_cast<std::size_t>(si)];
    const std::vector<RobotId> cur_set = sets[static_cast<std::size_t>(cur.set)];

    if (cur.cell == goal) {
      std::vector<RobotId> final_set = cur_set;
      for (RobotId q : parking_conflicts(cur.t)) {
        if (!contains(final_set, q)) final_set.insert(std::lower_bound(final_set.begin(), final_set.end(), q), q);
      }
      if (static_cast<int>(final_set.size()) <= budget) {
        const bool better =
            best < 0 || final_set.size() < best_set.size() ||
            (final_set.size() == best_set.size() &&
             cur.moves < states[static_cast<std::size_t>(best)].moves);
        if (better) {
          best = si;
          best_set = std::move(final_set);
          best_t = cur.t;
        }
        continue;
      }
    }
    if (best >= 0 || cur.t >= t_max) continue;

    const int nt = cur.t + 1;
    for (Direction d : order) {
      const CellId next = grid.neighbor(cur.cell, d);
      if (!grid.passable(next)) continue;
      const std::int32_t hn = h(next);
      if (hn == kUnreachable || nt + hn > t_max) continue;
      std::vector<RobotId> conf;
      auto note = [&](RobotId q) {
        if (q != kNoRobot && !contains(cur_set, q) &&
            std::find(conf.begin(), conf.end(), q) == conf.end()) {
          conf.push_back(q);
        }
      };
      note(table.occupant(nt, next));
      if (next != cur.cell) {
        const CellId delta = next - cur.cell;
        const RobotId leaving = table.occupant(cur.t, next);
        if (leaving != kNoRobot && table.occupant(nt, next + delta) != leaving) note(leaving);
        const RobotId entering = table.occupant(nt, cur.cell);
        if (entering != kNoRobot && table.occupant(cur.t, cur.cell - delta) != entering) note(entering);
      }
      if (static_cast<int>(cur_set.size() + conf.size()) > budget) continue;
      int next_set = cur.set;
      if (!conf.empty()) {
        std::vector<RobotId> merged = cur_set;
        merged.insert(merged.end(), conf.begin(), conf.end());
        std::sort(merged.begin(), merged.end());
        next_set = intern(std::move(merged));
      }
      const int nmoves = cur.moves + (d == Direction::Wait ? 0 : 1);
      const std::uint64_t key = key_of(next, nt, next_set);
      auto [it, inserted] = index.emplace(key, static_cast<int>(states.size()));
      if (inserted) {
        states.push_back({next, nt, next_set, nmoves, si, false});
      } else {
        State& s = states[static_cast<std::size_t>(it->second)];
        if (s.closed || s.moves <= nmoves) continue;
        s.moves = nmoves;
        s.parent = si;
      }
      queue.push(static_cast<std::size_t>(nt + hn), static_cast<std::size_t>(nt), it->second);
    }
  }
  if (best < 0) return std::nullopt;

  RelaxedResult r;
  r.arrival = states[static_cast<std::size_t>(best)].t;
  r.moves = states[static_cast<std::size_t>(best)].moves;
  r.violated = std::move(best_set);
  r.path.resize(static_cast<std::size_t>(r.arrival) + 1);
  for (int s = best; s >= 0; s = states[static_cast<std::size_t>(s)].parent) {
    r.path[static_cast<std::size_t>(states[static_cast<std::size_t>(s)].t)] =
        states[static_cast<std::size_t>(s)].cell;
  }
  return r;
}

}  // namespace cmplan
