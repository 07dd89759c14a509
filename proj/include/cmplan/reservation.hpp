#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cmplan/grid.hpp"
#include "cmplan/types.hpp"

namespace cmplan {

using IdPath = std::vector<CellId>;

struct ConflictError : Error {
  ConflictError(const std::string& what, int t_) : Error(what), t(t_) {}
  int t;
};

inline constexpr int kForever = std::numeric_limits<int>::max();

/// Space-time occupancy of registered robot paths. A robot occupies its path
/// cell at each t and stays parked on its last cell after the path ends; the
/// table stores timesteps 0..horizon and treats later times like `horizon`.
class ReservationTable {
 public:
  ReservationTable() = default;
  ReservationTable(const GridIndex& grid, std::size_t robots, int horizon = 0)
      : cells_(grid.size()), paths_(robots) {
    layers_ = 1;
    occ_.assign(static_cast<std::size_t>(cells_), kNoRobot);
    ensure_horizon(horizon);
  }

  [[nodiscard]] int horizon() const { return layers_ - 1; }
  [[nodiscard]] std::size_t num_robots() const { return paths_.size(); }

  /// Extends the stored horizon, keeping parked robots in place.
  void ensure_horizon(int h) {
    if (h <= horizon()) return;
    const auto old_layers = static_cast<std::size_t>(layers_);
    const auto new_layers = static_cast<std::size_t>(h + 1);
    const auto cells = static_cast<std::size_t>(cells_);
    occ_.resize(new_layers * cells);
    for (std::size_t t = old_layers; t < new_layers; ++t) {
      std::copy_n(occ_.begin() + static_cast<std::ptrdiff_t>((old_layers - 1) * cells), cells,
                  occ_.begin() + static_cast<std::ptrdiff_t>(t * cells));
    }
    layers_ = h + 1;
  }

  [[nodiscard]] RobotId occupant(int t, CellId c) const {
    const int tt = std::min(t, layers_ - 1);
    return occ_[static_cast<std::size_t>(tt) * static_cast<std::size_t>(cells_) +
                static_cast<std::size_t>(c)];
  }

  /// Whether a robot stepping from `from` (at t-1) to `to` (at t) is legal:
  /// the target is free at t, a robot leaving `to` moves the same way, and a
  /// robot entering `from` follows in the same direction. Requires t >= 1.
  [[nodiscard]] bool step_legal(CellId from, CellId to, int t) const {
    if (occupant(t, to) != kNoRobot) return false;
    if (from == to) return true;
    const CellId delta = to - from;
    const RobotId leaving = occupant(t - 1, to);
    if (leaving != kNoRobot && occupant(t, to + delta) != leaving) return false;
    const RobotId entering = occupant(t, from);
    if (entering != kNoRobot && occupant(t - 1, from - delta) != entering) return false;
    return true;
  }

  /// Latest time at which some robot occupies `c`; kForever when one parks
  /// there, -1 when the cell is never used.
  [[nodiscard]] int last_busy(CellId c) const {
    if (occupant(layers_ - 1, c) != kNoRobot) return kForever;
    for (int t = layers_ - 2; t >= 0; --t) {
      if (occupant(t, c) != kNoRobot) return t;
    }
    return -1;
  }

  [[nodiscard]] bool has_path(RobotId r) const { return !paths_[static_cast<std::size_t>(r)].empty(); }
  [[nodiscard]] const IdPath& path(RobotId r) const { return paths_[static_cast<std::size_t>(r)]; }

  /// Throws ConflictError when the path collides with registered robots.
  void register_path(RobotId r, IdPath path) {
    if (path.empty()) throw Error("cannot register an empty path");
    if (has_path(r)) throw Error("robot " + std::to_string(r) + " already has a path");
    ensure_horizon(static_cast<int>(path.size()) - 1);
    auto at = [&](int t) { return path[static_cast<std::size_t>(std::min<int>(t, static_cast<int>(path.size()) - 1))]; };
    for (int t = 0; t <= horizon(); ++t) {
      const CellId c = at(t);
      if (occupant(t, c) != kNoRobot) {
        throw ConflictError("robot " + std::to_string(r) + " collides with robot " +
                                std::to_string(occupant(t, c)) + " at t=" + std::to_string(t),
                            t);
      }
      if (t > 0 && !step_legal(at(t - 1), c, t)) {
        throw ConflictError("robot " + std::to_string(r) + " breaks the move rule at t=" +
                                std::to_string(t),
                            t);
      }
    }
    write(r, path, r);
    paths_[static_cast<std::size_t>(r)] = std::move(path);
  }

  /// Removes a robot's path and returns it.
  IdPath remove_path(RobotId r) {
    IdPath path = std::move(paths_[static_cast<std::size_t>(r)]);
    paths_[static_cast<std::size_t>(r)].clear();
    if (!path.empty()) write(r, path, kNoRobot);
    return path;
  }

  friend bool operator==(const ReservationTable& a, const ReservationTable& b) {
    // Tables compare by content over the longer horizon.
    if (a.cells_ != b.cells_ || a.paths_ != b.paths_) return false;
    const int h = std::max(a.horizon(), b.horizon());
    for (int t = 0; t <= h; ++t) {
      for (CellId c = 0; c < a.cells_; ++c) {
        if (a.occupant(t, c) != b.occupant(t, c)) return false;
      }
    }
    return true;
  }

 private:
  void write(RobotId r, const IdPath& path, RobotId value) {
    const auto cells = static_cast<std::size_t>(cells_);
    for (int t = 0; t < layers_; ++t) {
      const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t), path.size() - 1);
      auto& slot = occ_[static_cast<std::size_t>(t) * cells + static_cast<std::size_t>(path[i])];
      if (value == kNoRobot && slot != r) continue;
      slot = value;
    }
  }

  std::int32_t cells_ = 0;
  int layers_ = 0;
  std::vector<RobotId> occ_;
  std::vector<IdPath> paths_;
};

}  // namespace cmplan
