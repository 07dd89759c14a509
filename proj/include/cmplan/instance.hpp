#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "cmplan/types.hpp"

namespace cmplan {

/// Obstacles plus per-robot start and target cells; robot id is the list index.
struct Instance {
  std::string name;
  std::vector<Cell> obstacles;
  std::vector<Cell> starts;
  std::vector<Cell> targets;
  /// Contest density metadata when the source file carries it.
  std::optional<double> density;

  Instance() = default;
  Instance(std::string name_, std::vector<Cell> obstacles_, std::vector<Cell> starts_,
           std::vector<Cell> targets_)
      : name(std::move(name_)),
        obstacles(std::move(obstacles_)),
        starts(std::move(starts_)),
        targets(std::move(targets_)) {
    rebuild_index();
  }

  [[nodiscard]] std::size_t num_robots() const { return starts.size(); }

  [[nodiscard]] bool is_obstacle(Cell c) const { return obstacle_set_.contains(c); }

  /// Must be called after mutating `obstacles` directly.
  void rebuild_index() { obstacle_set_ = {obstacles.begin(), obstacles.end()}; }

  /// Throws ParseError naming the offending robot index when an invariant fails.
  void check() const {
    if (starts.size() != targets.size()) {
      throw ParseError("starts/targets length mismatch: " + std::to_string(starts.size()) +
                       " vs " + std::to_string(targets.size()));
    }
    if (starts.empty()) throw ParseError("instance has no robots");
    check_distinct(starts, "start");
    check_distinct(targets, "target");
    for (std::size_t i = 0; i < starts.size(); ++i) {
      if (is_obstacle(starts[i])) {
        throw ParseError("start of robot " + std::to_string(i) + " lies on an obstacle");
      }
      if (is_obstacle(targets[i])) {
        throw ParseError("target of robot " + std::to_string(i) + " lies on an obstacle");
      }
    }
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.name == b.name && a.obstacles == b.obstacles && a.starts == b.starts &&
           a.targets == b.targets;
  }

 private:
  static void check_distinct(const std::vector<Cell>& cells, const char* what) {
    std::unordered_set<Cell, CellHash> seen;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!seen.insert(cells[i]).second) {
        throw ParseError(std::string("duplicate ") + what + " at robot " + std::to_string(i));
      }
    }
  }

  std::unordered_set<Cell, CellHash> obstacle_set_;
};

/// Exchanges starts and targets of every robot. Applying it twice is the identity.
inline Instance swap_start_target(const Instance& inst) {
  Instance out(inst.name, inst.obstacles, inst.targets, inst.starts);
  out.density = inst.density;
  return out;
}

}  // namespace cmplan
