#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "cmplan/instance.hpp"
#include "cmplan/types.hpp"

namespace cmplan {

using Path = std::vector<Cell>;

/// A schedule stored as per-robot paths of common length T+1, where T is the
/// number of steps. Robots whose path ends early are padded by waiting.
class Solution {
 public:
  Solution() = default;

  /// Pads every path to the longest one by repeating its last cell.
  Solution(std::string instance_name, std::vector<Path> paths)
      : instance_(std::move(instance_name)), paths_(std::move(paths)) {
    std::size_t len = 1;
    for (const auto& p : paths_) len = std::max(len, p.size());
    for (auto& p : paths_) {
      if (p.empty()) throw Error("empty robot path");
      p.resize(len, p.back());
    }
  }

  /// A schedule with no steps: every robot stays at its start.
  static Solution stationary(const Instance& inst) {
    std::vector<Path> paths;
    paths.reserve(inst.num_robots());
    for (const Cell& s : inst.starts) paths.push_back({s});
    return Solution(inst.name, std::move(paths));
  }

  [[nodiscard]] const std::string& instance_name() const { return instance_; }
  [[nodiscard]] std::size_t num_robots() const { return paths_.size(); }
  [[nodiscard]] const std::vector<Path>& paths() const { return paths_; }
  [[nodiscard]] const Path& path(RobotId r) const { return paths_.at(static_cast<std::size_t>(r)); }

  /// Number of steps, including trailing all-wait steps.
  [[nodiscard]] int num_steps() const {
    return paths_.empty() ? 0 : static_cast<int>(paths_.front().size()) - 1;
  }

  [[nodiscard]] Cell position(RobotId r, int t) const {
    const Path& p = path(r);
    return p[static_cast<std::size_t>(std::min<int>(t, static_cast<int>(p.size()) - 1))];
  }

  /// Timestep maps: robot id -> non-wait direction. Step i moves from t=i to t=i+1.
  [[nodiscard]] std::vector<std::map<RobotId, Direction>> steps() const {
    std::vector<std::map<RobotId, Direction>> out(static_cast<std::size_t>(num_steps()));
    for (std::size_t r = 0; r < paths_.size(); ++r) {
      for (std::size_t t = 1; t < paths_[r].size(); ++t) {
        Direction d = direction_between(paths_[r][t - 1], paths_[r][t]);
        if (d != Direction::Wait) out[t - 1][static_cast<RobotId>(r)] = d;
      }
    }
    return out;
  }

  /// Builds paths by applying the steps to the start cells.
  static Solution from_steps(std::string instance_name, const std::vector<Cell>& starts,
                             const std::vector<std::map<RobotId, Direction>>& steps) {
    std::vector<Path> paths(starts.size());
    for (std::size_t r = 0; r < starts.size(); ++r) {
      paths[r].reserve(steps.size() + 1);
      paths[r].push_back(starts[r]);
    }
    for (const auto& step : steps) {
      for (auto& p : paths) p.push_back(p.back());
      for (const auto& [r, d] : step) {
        if (r < 0 || static_cast<std::size_t>(r) >= starts.size()) {
          throw ParseError("unknown robot id " + std::to_string(r));
        }
        auto& p = paths[static_cast<std::size_t>(r)];
        p.back() = p.back() + offset(d);
      }
    }
    return Solution(std::move(instance_name), std::move(paths));
  }

  /// Drops leading and trailing steps in which no robot moves.
  [[nodiscard]] Solution compacted() const {
    auto idle = [&](std::size_t t) {
      return std::all_of(paths_.begin(), paths_.end(),
                         [t](const Path& p) { return p[t] == p[t - 1]; });
    };
    std::size_t first = 1;
    std::size_t last = paths_.empty() ? 0 : paths_.front().size() - 1;
    while (first <= last && idle(first)) ++first;
    while (last >= first && idle(last)) --last;
    std::vector<Path> out;
    out.reserve(paths_.size());
    for (const Path& p : paths_) {
      if (first > last) {
        out.push_back({p.front()});
      } else {
        out.emplace_back(p.begin() + static_cast<std::ptrdiff_t>(first - 1),
                         p.begin() + static_cast<std::ptrdiff_t>(last + 1));
      }
    }
    return Solution(instance_, std::move(out));
  }

  /// Time-reversed schedule (directions inverted) of the compacted schedule,
  /// so SUM and MAX are preserved.
  [[nodiscard]] Solution reversed() const {
    std::vector<Path> rev = compacted().paths_;
    for (auto& p : rev) std::reverse(p.begin(), p.end());
    return Solution(instance_, std::move(rev));
  }

  friend bool operator==(const Solution& a, const Solution& b) {
    return a.instance_ == b.instance_ && a.paths_ == b.paths_;
  }

 private:
  std::string instance_;
  std::vector<Path> paths_;
};

}  // namespace cmplan
