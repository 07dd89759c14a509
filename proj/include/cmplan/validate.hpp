#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cmplan/instance.hpp"
#include "cmplan/solution.hpp"

namespace cmplan {

enum class Rule {
  Overlap,    // two robots share a cell, or a robot stands on an obstacle
  Direction,  // robot enters a cell vacated by a robot not moving the same way
  Target,     // robot does not end on its target
  Jump,       // consecutive positions are not 4-adjacent
  Start,      // path does not begin at the robot's start
};

inline std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::Overlap: return "overlap";
    case Rule::Direction: return "direction";
    case Rule::Target: return "target";
    case Rule::Jump: return "jump";
    case Rule::Start: return "start";
  }
  return "?";
}

struct Violation {
  int t = 0;
  std::vector<RobotId> robots;  // an obstacle overlap lists one robot
  Rule rule = Rule::Overlap;

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline std::string format_violation(const Violation& v) {
  std::ostringstream os;
  os << "t=" << v.t << " robots=";
  for (std::size_t i = 0; i < v.robots.size(); ++i) os << (i ? "," : "") << v.robots[i];
  os << " rule=" << to_string(v.rule);
  return os.str();
}

struct ValidationReport {
  std::vector<Violation> violations;

  [[nodiscard]] bool ok() const { return violations.empty(); }
  [[nodiscard]] bool has(Rule rule) const {
    return std::any_of(violations.begin(), violations.end(),
                       [rule](const Violation& v) { return v.rule == rule; });
  }
};

/// Checks every timestep and collects all violations instead of stopping at the first.
inline ValidationReport validate(const Instance& inst, const Solution& s) {
  ValidationReport report;
  auto add = [&](int t, std::vector<RobotId> robots, Rule rule) {
    std::sort(robots.begin(), robots.end());
    report.violations.push_back({t, std::move(robots), rule});
  };

  const std::size_t n = inst.num_robots();
  if (s.num_robots() != n) {
    std::vector<RobotId> all;
    add(0, all, Rule::Start);
    return report;
  }
  const int steps = s.num_steps();

  std::unordered_map<Cell, RobotId, CellHash> prev;
  std::unordered_map<Cell, RobotId, CellHash> cur;
  prev.reserve(n * 2);
  cur.reserve(n * 2);

  for (int t = 0; t <= steps; ++t) {
    cur.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<RobotId>(i);
      const Cell c = s.position(r, t);
      if (t == 0 && c != inst.starts[i]) add(0, {r}, Rule::Start);
      if (inst.is_obstacle(c)) add(t, {r}, Rule::Overlap);
      auto [it, inserted] = cur.emplace(c, r);
      if (!inserted) add(t, {it->second, r}, Rule::Overlap);
    }
    if (t > 0) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<RobotId>(i);
        const Cell from = s.position(r, t - 1);
        const Cell to = s.position(r, t);
        if (from == to) continue;
        if (manhattan(from, to) != 1) {
          add(t, {r}, Rule::Jump);
          continue;
        }
        auto it = prev.find(to);
        if (it == prev.end() || it->second == r) continue;
        const RobotId q = it->second;
        const Cell q_delta = s.position(q, t) - s.position(q, t - 1);
        if (q_delta != to - from) add(t, {r, q}, Rule::Direction);
      }
    }
    std::swap(prev, cur);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (s.position(static_cast<RobotId>(i), steps) != inst.targets[i]) {
      add(steps, {static_cast<RobotId>(i)}, Rule::Target);
    }
  }
  // A swap is seen from both robots; report it once.
  auto& v = report.violations;
  auto key = [](const Violation& x) { return std::tie(x.t, x.rule, x.robots); };
  std::stable_sort(v.begin(), v.end(), [&](const Violation& a, const Violation& b) { return key(a) < key(b); });
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return report;
}

}  // namespace cmplan
