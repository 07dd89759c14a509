#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cmplan/assignment.hpp"
#include "cmplan/astar.hpp"
#include "cmplan/filler.hpp"
#include "cmplan/grid.hpp"
#include "cmplan/heuristic.hpp"
#include "cmplan/instance.hpp"
#include "cmplan/reservation.hpp"
#include "cmplan/score.hpp"
#include "cmplan/solution.hpp"
#include "cmplan/validate.hpp"
#include "json.hpp"

namespace cmplan {

inline std::string_view to_string(PathRandomization r) {
  switch (r) {
    case PathRandomization::Off: return "off";
    case PathRandomization::RandomShortest: return "random-shortest";
    case PathRandomization::Approximate: return "approximate";
  }
  return "?";
}

struct InitConfig {
  FillerShape shape = FillerShape::Hexagon;
  CostMode cost = CostMode::Sum;
  bool swap = false;
  PathRandomization randomization = PathRandomization::Off;
  std::uint64_t seed = 0;
  Objective objective = Objective::Sum;
  /// Final phase replans each robot from its start; otherwise robots continue
  /// from their intermediate cell after everyone has parked there.
  bool reroute_from_start = true;
  /// Allow one retry with a doubled time horizon when a search fails.
  bool allow_retry = true;

  /// The i-th configuration of the portfolio enumeration.
  static InitConfig enumerate(std::size_t i, std::uint64_t base_seed, Objective obj) {
    InitConfig c;
    c.shape = kAllShapes[i % kAllShapes.size()];
    c.cost = static_cast<CostMode>((i / 5) % 3);
    c.swap = (i / 15) % 2 == 1;
    c.randomization = static_cast<PathRandomization>((i / 30) % 3);
    c.seed = base_seed + i;
    c.objective = obj;
    return c;
  }

  [[nodiscard]] std::string label() const {
    return std::string(to_string(shape)) + "/" + std::string(to_string(cost)) + "/" +
           (swap ? "swap" : "direct") + "/" + std::string(to_string(randomization)) + "/" +
           std::to_string(seed);
  }
};

/// Raised when a configuration cannot route every robot within its retries.
struct InitError : Error {
  using Error::Error;
};

/// Everything the initializer computed, kept for inspection and tests.
struct InitOutcome {
  std::vector<Cell> intermediates;  // matched cell per robot
  std::vector<Path> staging;        // start -> intermediate, all arriving at staging_time
  int staging_time = 0;
  std::optional<Solution> solution;
  bool retried = false;
  bool first_attempt_ok = true;
  std::string error;
};

namespace detail {

class Initialization {
 public:
  Initialization(const Instance& inst, const InitConfig& cfg) : inst_(inst), cfg_(cfg), rng_(cfg.seed) {}

  InitOutcome run() {
    InitOutcome out;
    const std::size_t n = inst_.num_robots();
    if (n == 0 || inst_.starts == inst_.targets) {
      out.solution = Solution::stationary(inst_);
      return out;
    }
    try {
      choose_intermediates(out);
      stage(out);
      finish(out);
    } catch (const InitError& e) {
      out.error = e.what();
      out.solution.reset();
    }
    return out;
  }

 private:
  void choose_intermediates(InitOutcome& out) {
    const std::size_t n = inst_.num_robots();
    // Targets never serve as intermediates: a robot parked on another's target
    // would make that target unreachable.
    std::vector<Cell> sorted_targets = inst_.targets;
    std::sort(sorted_targets.begin(), sorted_targets.end());
    std::vector<Cell> candidates;
    for (const Cell& c : generate_filler(cfg_.shape, inst_, 3 * n + n)) {
      if (std::binary_search(sorted_targets.begin(), sorted_targets.end(), c)) continue;
      if (candidates.size() < 3 * n) candidates.push_back(c);
    }
    grid_ = GridIndex::covering(inst_, candidates, default_margin(n));
    const AssignmentProblem problem = build_costs(grid_, inst_, candidates, cfg_.cost);
    const auto match = min_cost_assign(problem);
    out.intermediates.resize(n);
    for (std::size_t r = 0; r < n; ++r) out.intermediates[r] = candidates[match[r]];
    depth_ = depth_values(grid_, out.intermediates);
  }

  // Plans the start -> intermediate phase backwards in time: every robot waits
  // on its intermediate while one at a time is sent to its start, deepest start
  // first, and the result is replayed in reverse.
  void stage(InitOutcome& out) {
    const std::size_t n = inst_.num_robots();
    ReservationTable table(grid_, n);
    for (std::size_t r = 0; r < n; ++r) table.register_path(static_cast<RobotId>(r), {grid_.id(out.intermediates[r])});
    std::vector<RobotId> order = by_depth(inst_.starts);
    PathPlanner planner(grid_);
    for (RobotId r : order) {
      const auto ri = static_cast<std::size_t>(r);
      table.remove_path(r);
      const CellId from = grid_.id(out.intermediates[ri]);
      const CellId to = grid_.id(inst_.starts[ri]);
      const Heuristic h = Heuristic::obstacle_bfs(grid_, to);
      SearchOptions opt = options(Objective::Max, table.horizon() + 2 * grid_.diameter());
      auto found = search(planner, from, to, table, h, opt, out);
      if (!found) throw InitError("robot " + std::to_string(r) + " cannot reach its intermediate cell");
      table.register_path(r, std::move(found->path));
    }
    out.staging_time = table.horizon();
    const int t_end = out.staging_time;
    out.staging.assign(n, {});
    for (std::size_t r = 0; r < n; ++r) {
      const IdPath& p = table.path(static_cast<RobotId>(r));
      Path& fwd = out.staging[r];
      fwd.reserve(static_cast<std::size_t>(t_end) + 1);
      for (int t = 0; t <= t_end; ++t) {
        const auto i = static_cast<std::size_t>(std::min<int>(t_end - t, static_cast<int>(p.size()) - 1));
        fwd.push_back(grid_.cell(p[i]));
      }
    }
  }

  // Routes robots to their targets in decreasing depth of the target against
  // the staged paths of the others.
  void finish(InitOutcome& out) {
    const std::size_t n = inst_.num_robots();
    ReservationTable table(grid_, n);
    std::vector<IdPath> staged(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (const Cell& c : out.staging[r]) staged[r].push_back(grid_.id(c));
      table.register_path(static_cast<RobotId>(r), staged[r]);
    }
    PathPlanner planner(grid_);
    const int t0 = cfg_.reroute_from_start ? 0 : out.staging_time;
    for (RobotId r : by_depth(inst_.targets)) {
      const auto ri = static_cast<std::size_t>(r);
      table.remove_path(r);
      const CellId from = staged[ri][static_cast<std::size_t>(t0)];
      const CellId to = grid_.id(inst_.targets[ri]);
      const Heuristic h = Heuristic::obstacle_bfs(grid_, to);
      SearchOptions opt = options(cfg_.objective, out.staging_time + 2 * grid_.diameter());
      opt.t_start = t0;
      auto found = search(planner, from, to, table, h, opt, out);
      if (!found) throw InitError("robot " + std::to_string(r) + " cannot reach its target");
      IdPath path(staged[ri].begin(), staged[ri].begin() + t0);
      path.insert(path.end(), found->path.begin(), found->path.end());
      table.register_path(r, std::move(path));
    }
    std::vector<Path> paths(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (CellId c : table.path(static_cast<RobotId>(r))) paths[r].push_back(grid_.cell(c));
    }
    out.solution = Solution(inst_.name, std::move(paths));
  }

  std::optional<SearchResult> search(PathPlanner& planner, CellId from, CellId to,
                                     const ReservationTable& table, const Heuristic& h,
                                     SearchOptions opt, InitOutcome& out) {
    auto found = planner.find_path(from, to, table, h, opt);
    if (found) return found;
    out.first_attempt_ok = false;
    if (!cfg_.allow_retry) return std::nullopt;
    out.retried = true;
    opt.t_max *= 2;
    return planner.find_path(from, to, table, h, opt);
  }

  SearchOptions options(Objective obj, int t_max) {
    SearchOptions opt;
    opt.objective = obj;
    opt.t_max = t_max;
    opt.randomization = cfg_.randomization;
    opt.rng = &rng_;
    return opt;
  }

  std::vector<RobotId> by_depth(const std::vector<Cell>& cells) const {
    std::vector<RobotId> order(cells.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](RobotId a, RobotId b) {
      return depth_.at(grid_, cells[static_cast<std::size_t>(a)]) >
             depth_.at(grid_, cells[static_cast<std::size_t>(b)]);
    });
    return order;
  }

  const Instance& inst_;
  InitConfig cfg_;
  std::mt19937_64 rng_;
  GridIndex grid_;
  DistanceField depth_;
};

}  // namespace detail

/// Runs one initialization and keeps the intermediate data. A swapped
/// configuration plans the swapped instance and returns the reversed schedule;
/// its staging data then refers to the swapped instance.
inline InitOutcome initialize_detailed(const Instance& inst, const InitConfig& cfg) {
  if (!cfg.swap) return detail::Initialization(inst, cfg).run();
  InitConfig direct = cfg;
  direct.swap = false;
  InitOutcome out = detail::Initialization(swap_start_target(inst), direct).run();
  if (out.solution) out.solution = out.solution->reversed();
  return out;
}

/// A valid schedule for `inst`; throws InitError when the configuration fails.
inline Solution initialize(const Instance& inst, const InitConfig& cfg = {}) {
  InitOutcome out = initialize_detailed(inst, cfg);
  if (!out.solution) throw InitError("initialization failed (" + cfg.label() + "): " + out.error);
  const ValidationReport report = validate(inst, *out.solution);
  if (!report.ok()) {
    throw Error("initializer produced an invalid schedule: " + format_violation(report.violations.front()));
  }
  return std::move(*out.solution);
}

struct PortfolioEntry {
  InitConfig config;
  std::optional<Solution> solution;
  std::int64_t sum = 0;
  std::int64_t max = 0;
  bool retried = false;
  double seconds = 0;
  std::string error;

  [[nodiscard]] std::int64_t score(Objective obj) const { return obj == Objective::Sum ? sum : max; }
};

/// Runs the first `budget` enumerated configurations on up to `threads`
/// workers and returns them sorted by the requested objective, failures last.
/// Throws InitError when every configuration fails.
inline std::vector<PortfolioEntry> portfolio(const Instance& inst, std::size_t budget,
                                             std::uint64_t base_seed = 0,
                                             Objective obj = Objective::Sum, unsigned threads = 0) {
  if (budget == 0) throw Error("portfolio budget must be at least 1");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(budget));
  std::vector<PortfolioEntry> entries(budget);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < budget; i = next++) {
      PortfolioEntry& e = entries[i];
      e.config = InitConfig::enumerate(i, base_seed, obj);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        InitOutcome out = initialize_detailed(inst, e.config);
        e.retried = out.retried;
        if (out.solution) {
          const ValidationReport report = validate(inst, *out.solution);
          if (report.ok()) {
            e.sum = score_unchecked(*out.solution, Objective::Sum);
            e.max = score_unchecked(*out.solution, Objective::Max);
            e.solution = std::move(out.solution);
          } else {
            e.error = "invalid schedule: " + format_violation(report.violations.front());
          }
        } else {
          e.error = out.error;
        }
      } catch (const std::exception& ex) {
        e.error = ex.what();
      }
      e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::stable_sort(entries.begin(), entries.end(), [obj](const PortfolioEntry& a, const PortfolioEntry& b) {
    if (a.solution.has_value() != b.solution.has_value()) return a.solution.has_value();
    if (!a.solution) return false;
    if (a.score(obj) != b.score(obj)) return a.score(obj) < b.score(obj);
    return a.score(other(obj)) < b.score(other(obj));
  });
  if (!entries.front().solution) throw InitError("every initialization failed: " + entries.front().error);
  return entries;
}

/// Number of distinct knob combinations in the enumeration.
inline constexpr std::size_t kPortfolioSize = 90;

/// Like portfolio(), but when all of the first `budget` configurations fail
/// the remaining ones of the full enumeration are tried before giving up.
inline std::vector<PortfolioEntry> portfolio_with_fallback(const Instance& inst, std::size_t budget,
                                                           std::uint64_t base_seed = 0,
                                                           Objective obj = Objective::Sum,
                                                           unsigned threads = 0) {
  try {
    return portfolio(inst, budget, base_seed, obj, threads);
  } catch (const InitError&) {
    if (budget >= kPortfolioSize) throw;
  }
  return portfolio(inst, kPortfolioSize, base_seed, obj, threads);
}

inline nlohmann::json portfolio_report(const std::vector<PortfolioEntry>& entries) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json row{{"config",
                        {{"shape", to_string(e.config.shape)},
                         {"cost", to_string(e.config.cost)},
                         {"swap", e.config.swap},
                         {"randomization", to_string(e.config.randomization)},
                         {"seed", e.config.seed}}},
                       {"status", e.solution ? "ok" : "failed"},
                       {"seconds", e.seconds},
                       {"retried", e.retried}};
    if (e.solution) {
      row["sum"] = e.sum;
      row["max"] = e.max;
    } else {
      row["error"] = e.error;
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace cmplan
