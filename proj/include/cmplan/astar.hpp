#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cmplan/bucket_queue.hpp"
#include "cmplan/grid.hpp"
#include "cmplan/heuristic.hpp"
#include "cmplan/reservation.hpp"

namespace cmplan {

inline constexpr int kUnlimitedRadius = -1;

/// How deviation from the incumbent path is measured for the radius limit.
enum class DeviationMetric { Bfs, Manhattan };

/// Cells a replanned path may use: everything within `radius` of the original
/// path's cell set. The original cells are always included.
struct RadiusConstraint {
  int radius = 0;
  std::vector<CellId> allowed;
};

/// Builds radius regions with reusable scratch buffers.
class RegionBuilder {
 public:
  explicit RegionBuilder(const GridIndex& grid)
      : grid_(&grid), dist_(static_cast<std::size_t>(grid.size()), -1) {}

  RadiusConstraint build(std::span<const CellId> path, int radius,
                         DeviationMetric metric = DeviationMetric::Bfs) {
    RadiusConstraint rc;
    rc.radius = radius;
    auto& out = rc.allowed;
    for (CellId c : path) {
      if (dist_[static_cast<std::size_t>(c)] == -1) {
        dist_[static_cast<std::size_t>(c)] = 0;
        out.push_back(c);
      }
    }
    // With Manhattan deviation the flood crosses obstacles without admitting
    // them, so reach is measured as if they were absent.
    std::vector<CellId> frontier(out.begin(), out.end());
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const CellId v = frontier[head];
      const int dv = dist_[static_cast<std::size_t>(v)];
      if (dv >= radius) continue;
      for (Direction d : kMoveDirections) {
        const CellId u = grid_->neighbor(v, d);
        if (dist_[static_cast<std::size_t>(u)] != -1) continue;
        const bool free = grid_->passable(u);
        if (!free && (metric == DeviationMetric::Bfs || !grid_->contains(grid_->cell(u)))) continue;
        dist_[static_cast<std::size_t>(u)] = dv + 1;
        frontier.push_back(u);
        if (free) out.push_back(u);
      }
    }
    for (CellId c : frontier) dist_[static_cast<std::size_t>(c)] = -1;
    return rc;
  }

 private:
  const GridIndex* grid_;
  std::vector<int> dist_;
};

enum class PathRandomization { Off, RandomShortest, Approximate };

struct SearchOptions {
  Objective objective = Objective::Sum;
  int t_max = 0;
  /// Departure time; the returned path covers t_start..arrival.
  int t_start = 0;
  const RadiusConstraint* radius = nullptr;
  PathRandomization randomization = PathRandomization::Off;
  std::mt19937_64* rng = nullptr;
  /// Probability of deferring a successor by one in Approximate mode.
  double epsilon = 0.25;
  /// Abort after this many expansions (0 = unlimited).
  std::size_t max_expansions = 0;
};

struct SearchResult {
  IdPath path;        // path[i] is the cell at t_start + i, up to arrival
  std::int64_t cost;  // moves for SUM, arrival time for MAX
  int arrival;
  int moves;
  std::size_t expanded;
};

/// Space-time A* over (cell, t) against a reservation table, using a two-level
/// bucket queue keyed by (f, t). SUM minimises moves then arrival; MAX
/// minimises arrival then moves. The robot stays parked on the goal forever
/// after arrival, so arrival must come after the goal's last reservation.
class PathPlanner {
 public:
  explicit PathPlanner(const GridIndex& grid)
      : grid_(&grid), allowed_(static_cast<std::size_t>(grid.size()), 0) {}

  [[nodiscard]] const GridIndex& grid() const { return *grid_; }

  std::optional<SearchResult> find_path(CellId start, CellId goal, const ReservationTable& table,
                                        const Heuristic& h, const SearchOptions& opt) {
    next_generation();
    const std::uint32_t seen = gen_;
    const std::uint32_t closed = gen_ + 1;
    const bool sum = opt.objective == Objective::Sum;

    if (!grid_->passable(start) || !grid_->passable(goal)) return std::nullopt;
    const int t0 = opt.t_start;
    if (table.occupant(t0, start) != kNoRobot) return std::nullopt;
    if (opt.radius) {
      for (CellId c : opt.radius->allowed) allowed_[static_cast<std::size_t>(c)] = gen_;
      if (allowed_[static_cast<std::size_t>(start)] != gen_ ||
          allowed_[static_cast<std::size_t>(goal)] != gen_) {
        return std::nullopt;
      }
    }
    const int goal_free_after = table.last_busy(goal);
    if (goal_free_after == kForever) return std::nullopt;
    const std::int32_t h0 = h(start);
    if (h0 == kUnreachable || t0 + h0 > opt.t_max) return std::nullopt;

    queue_.clear();
    {
      Entry& e = entry(start, t0);
      e.stamp = seen;
      e.label = 0;
      e.parent = static_cast<std::uint8_t>(Direction::Wait);
    }
    queue_.push(static_cast<std::size_t>(sum ? h0 : t0 + h0), static_cast<std::size_t>(t0), start);

    std::array<Direction, 5> order = {Direction::N, Direction::E, Direction::S, Direction::W,
                                      Direction::Wait};
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::size_t expanded = 0;

    while (!queue_.empty()) {
      auto [f, tt, cell] = queue_.pop();
      const int t = static_cast<int>(tt);
      Entry& cur = entry(cell, t);
      if (cur.stamp == closed) continue;
      cur.stamp = closed;
      ++expanded;
      if (cell == goal && t > goal_free_after) return reconstruct(t0, goal, t, cur.label, sum, expanded);
      if (opt.max_expansions && expanded >= opt.max_expansions) return std::nullopt;
      if (t >= opt.t_max) continue;

      const int nt = t + 1;
      const std::int32_t label = cur.label;
      if (opt.randomization == PathRandomization::RandomShortest && opt.rng) {
        std::shuffle(order.begin(), order.end(), *opt.rng);
      }
      for (Direction d : order) {
        const CellId next = grid_->neighbor(cell, d);
        if (!grid_->passable(next)) continue;
        if (opt.radius && allowed_[static_cast<std::size_t>(next)] != gen_) continue;
        if (!table.step_legal(cell, next, nt)) continue;
        const std::int32_t hn = h(next);
        if (hn == kUnreachable || nt + hn > opt.t_max) continue;
        const std::int32_t nlabel = label + (d == Direction::Wait ? 0 : 1);
        Entry& e = entry(next, nt);
        if (e.stamp == closed) continue;
        if (e.stamp == seen && e.label <= nlabel) continue;
        e.stamp = seen;
        e.label = nlabel;
        e.parent = static_cast<std::uint8_t>(d);
        std::size_t key = static_cast<std::size_t>(sum ? nlabel + hn : nt + hn);
        if (opt.randomization == PathRandomization::Approximate && opt.rng &&
            coin(*opt.rng) < opt.epsilon) {
          ++key;
        }
        queue_.push(key, static_cast<std::size_t>(nt), next);
      }
    }
    return std::nullopt;
  }

 private:
  struct Entry {
    std::uint32_t stamp = 0;
    std::int32_t label = 0;
    std::uint8_t parent = 0;
  };

  void next_generation() {
    gen_ += 2;
    if (gen_ >= 0xFFFFFFF0u) {
      gen_ = 2;
      for (auto& layer : layers_) std::fill(layer.begin(), layer.end(), Entry{});
      std::fill(allowed_.begin(), allowed_.end(), 0);
    }
  }

  Entry& entry(CellId c, int t) {
    const auto ti = static_cast<std::size_t>(t);
    if (ti >= layers_.size()) layers_.resize(ti + 1);
    auto& layer = layers_[ti];
    if (layer.empty()) layer.assign(static_cast<std::size_t>(grid_->size()), Entry{});
    return layer[static_cast<std::size_t>(c)];
  }

  SearchResult reconstruct(int t0, CellId goal, int arrival, std::int32_t moves, bool sum,
                           std::size_t expanded) {
    SearchResult r;
    r.path.resize(static_cast<std::size_t>(arrival - t0) + 1);
    CellId c = goal;
    for (int t = arrival; t > t0; --t) {
      r.path[static_cast<std::size_t>(t - t0)] = c;
      const auto d = static_cast<Direction>(entry(c, t).parent);
      c -= grid_->delta(d);
    }
    r.path[0] = c;
    r.arrival = arrival;
    r.moves = moves;
    r.cost = sum ? moves : arrival;
    r.expanded = expanded;
    return r;
  }

  const GridIndex* grid_;
  std::vector<std::vector<Entry>> layers_;
  std::vector<std::uint32_t> allowed_;
  std::uint32_t gen_ = 0;
  LayeredBucketQueue<CellId> queue_;
};

/// One-shot convenience wrapper around PathPlanner.
inline std::optional<SearchResult> astar(const GridIndex& grid, CellId start, CellId goal,
                                         const ReservationTable& table, const Heuristic& h,
                                         const SearchOptions& opt) {
  PathPlanner planner(grid);
  return planner.find_path(start, goal, table, h, opt);
}

}  // namespace cmplan
