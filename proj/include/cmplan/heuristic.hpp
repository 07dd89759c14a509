#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "cmplan/grid.hpp"

namespace cmplan {

/// Admissible lower bound on the remaining moves (and time) to a goal cell.
class Heuristic {
 public:
  enum class Kind { Manhattan, ObstacleBfs };

  static Heuristic manhattan(const GridIndex& grid, CellId goal) {
    Heuristic h;
    h.kind_ = Kind::Manhattan;
    h.grid_ = &grid;
    h.goal_ = grid.cell(goal);
    return h;
  }

  static Heuristic obstacle_bfs(std::shared_ptr<const DistanceField> field) {
    Heuristic h;
    h.kind_ = Kind::ObstacleBfs;
    h.field_ = std::move(field);
    return h;
  }

  static Heuristic obstacle_bfs(const GridIndex& grid, CellId goal) {
    return obstacle_bfs(std::make_shared<const DistanceField>(
        bfs_field(grid, std::span<const CellId>(&goal, 1))));
  }

  [[nodiscard]] Kind kind() const { return kind_; }

  /// kUnreachable when the goal cannot be reached at all.
  [[nodiscard]] std::int32_t operator()(CellId c) const {
    if (kind_ == Kind::ObstacleBfs) return (*field_)[c];
    return manhattan_distance(grid_->cell(c), goal_);
  }

 private:
  static std::int32_t manhattan_distance(Cell a, Cell b) { return cmplan::manhattan(a, b); }

  Kind kind_ = Kind::Manhattan;
  const GridIndex* grid_ = nullptr;
  Cell goal_;
  std::shared_ptr<const DistanceField> field_;
};

enum class HeuristicPolicy { Manhattan, ObstacleBfs, Auto };

/// Obstacle-BFS goal fields computed on demand. In Auto mode fields are cached
/// up to `capacity`; goals beyond that fall back to Manhattan.
class HeuristicCache {
 public:
  explicit HeuristicCache(const GridIndex& grid, HeuristicPolicy policy = HeuristicPolicy::Auto,
                          std::size_t capacity = 4096)
      : grid_(&grid), policy_(policy), capacity_(capacity) {}

  Heuristic get(CellId goal) {
    if (policy_ == HeuristicPolicy::Manhattan) return Heuristic::manhattan(*grid_, goal);
    if (auto it = fields_.find(goal); it != fields_.end()) return Heuristic::obstacle_bfs(it->second);
    if (policy_ == HeuristicPolicy::Auto && fields_.size() >= capacity_) {
      return Heuristic::manhattan(*grid_, goal);
    }
    auto field = std::make_shared<const DistanceField>(
        bfs_field(*grid_, std::span<const CellId>(&goal, 1)));
    fields_.emplace(goal, field);
    return Heuristic::obstacle_bfs(std::move(field));
  }

  [[nodiscard]] bool cached(CellId goal) const { return fields_.contains(goal); }

 private:
  const GridIndex* grid_;
  HeuristicPolicy policy_;
  std::size_t capacity_;
  std::unordered_map<CellId, std::shared_ptr<const DistanceField>> fields_;
};

}  // namespace cmplan
