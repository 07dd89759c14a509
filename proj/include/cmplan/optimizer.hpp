#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cmplan/astar.hpp"
#include "cmplan/grid.hpp"
#include "cmplan/heuristic.hpp"
#include "cmplan/instance.hpp"
#include "cmplan/joint.hpp"
#include "cmplan/relaxed.hpp"
#include "cmplan/reservation.hpp"
#include "cmplan/solution.hpp"
#include "cmplan/validate.hpp"

namespace cmplan {

enum class SamplerKind { Completion, Closeness, Constraints };

inline std::string_view to_string(SamplerKind s) {
  switch (s) {
    case SamplerKind::Completion: return "completion";
    case SamplerKind::Closeness: return "closeness";
    case SamplerKind::Constraints: return "constraints";
  }
  return "?";
}

inline SamplerKind parse_sampler(std::string_view s) {
  if (s == "completion") return SamplerKind::Completion;
  if (s == "closeness") return SamplerKind::Closeness;
  if (s == "constraints") return SamplerKind::Constraints;
  throw Error("unknown sampler '" + std::string(s) + "'");
}

struct OptimizerConfig {
  Objective objective = Objective::Sum;
  std::vector<int> k_schedule{1, 2, 3, 4, 5, 6, 7};
  int radius = 20;  // kUnlimitedRadius for no restriction
  SamplerKind sampler = SamplerKind::Completion;
  std::uint64_t max_iterations = 0;  // 0 = no iteration limit
  double time_limit = 0;             // seconds, 0 = no time limit
  std::uint64_t seed = 0;
  /// Share of k=2 iterations handled by the joint pair search.
  double joint_fraction = 0.1;
  std::size_t joint_max_expansions = 200000;
  /// Re-validate the incumbent after every accepted move.
  bool check_accepts = false;

  void check() const {
    if (k_schedule.empty()) throw Error("empty k schedule");
    for (int k : k_schedule)
      if (k < 1) throw Error("k must be at least 1");
    if (radius < 0 && radius != kUnlimitedRadius) throw Error("radius must be nonnegative");
    if (joint_fraction < 0 || joint_fraction > 1) throw Error("joint fraction must lie in [0, 1]");
  }
};

/// Parses "1..7", "3" or "1,2,5".
inline std::vector<int> parse_k_schedule(std::string_view s) {
  std::vector<int> out;
  auto number = [&](std::string_view t) {
    if (t.empty()) throw Error("bad k schedule '" + std::string(s) + "'");
    int v = 0;
    for (char c : t) {
      if (c < '0' || c > '9') throw Error("bad k schedule '" + std::string(s) + "'");
      v = v * 10 + (c - '0');
    }
    return v;
  };
  if (auto dots = s.find(".."); dots != std::string_view::npos) {
    const int lo = number(s.substr(0, dots));
    const int hi = number(s.substr(dots + 2));
    if (lo < 1 || hi < lo) throw Error("bad k schedule '" + std::string(s) + "'");
    for (int k = lo; k <= hi; ++k) out.push_back(k);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    out.push_back(number(s.substr(pos, comma - pos)));
    if (out.back() < 1) throw Error("bad k schedule '" + std::string(s) + "'");
    pos = comma + 1;
  }
  return out;
}

/// Time of the robot's last move; 0 when it never moves.
inline int completion_time(const Solution& s, RobotId r) {
  const Path& p = s.path(r);
  for (std::size_t t = p.size(); t-- > 1;) {
    if (p[t] != p[t - 1]) return static_cast<int>(t);
  }
  return 0;
}

/// Number of timesteps at which the two robots are within L1 distance 1, with
/// the shorter path parked on its last cell.
template <typename P>
std::int64_t path_proximity(const P& p, const P& q) {
  const std::size_t len = std::max(p.size(), q.size());
  std::int64_t count = 0;
  for (std::size_t t = 0; t < len; ++t) {
    const auto& a = p[std::min(t, p.size() - 1)];
    const auto& b = q[std::min(t, q.size() - 1)];
    if (manhattan(a, b) <= 1) ++count;
  }
  return count;
}

struct SampleResult {
  std::vector<RobotId> robots;  // distinct, by decreasing completion time
  SamplerKind kind = SamplerKind::Completion;
};

namespace detail {

/// Draws `count` distinct indices from `pool` without replacement with the given
/// weights; once the remaining weights are all zero the rest is uniform.
inline void draw_weighted(std::vector<RobotId>& pool, std::vector<std::int64_t>& weights, std::size_t count,
                          std::mt19937_64& rng, std::vector<RobotId>& out) {
  count = std::min(count, pool.size());
  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t total = std::accumulate(weights.begin(), weights.end(), std::int64_t{0});
    std::size_t pick = 0;
    if (total > 0) {
      std::int64_t x = std::uniform_int_distribution<std::int64_t>(0, total - 1)(rng);
      while (x >= weights[pick]) x -= weights[pick++];
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng);
    }
    out.push_back(pool[pick]);
    pool[pick] = pool.back();
    pool.pop_back();
    weights[pick] = weights.back();
    weights.pop_back();
  }
}

inline void order_by_completion(std::vector<RobotId>& robots, std::span<const int> completion) {
  std::sort(robots.begin(), robots.end(), [&](RobotId a, RobotId b) {
    const int ca = completion[static_cast<std::size_t>(a)];
    const int cb = completion[static_cast<std::size_t>(b)];
    return ca != cb ? ca > cb : a < b;
  });
}

inline std::vector<RobotId> all_robots(std::size_t n) {
  std::vector<RobotId> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace detail

/// k robots drawn without replacement with weight = completion time.
inline SampleResult sample_completion(std::span<const int> completion, std::size_t k, std::mt19937_64& rng) {
  SampleResult out;
  std::vector<RobotId> pool = detail::all_robots(completion.size());
  std::vector<std::int64_t> weights(completion.begin(), completion.end());
  detail::draw_weighted(pool, weights, k, rng, out.robots);
  detail::order_by_completion(out.robots, completion);
  return out;
}

/// First robot by completion time, the remaining k-1 by proximity to its path.
template <typename P>
SampleResult sample_closeness(std::span<const P> paths, std::span<const int> completion, std::size_t k,
                              std::mt19937_64& rng) {
  SampleResult out;
  out.kind = SamplerKind::Closeness;
  std::vector<RobotId> pool = detail::all_robots(completion.size());
  std::vector<std::int64_t> weights(completion.begin(), completion.end());
  detail::draw_weighted(pool, weights, std::min<std::size_t>(k, 1), rng, out.robots);
  if (k > 1 && !out.robots.empty()) {
    const P& first = paths[static_cast<std::size_t>(out.robots.front())];
    for (std::size_t i = 0; i < pool.size(); ++i) {
      weights[i] = path_proximity(first, paths[static_cast<std::size_t>(pool[i])]);
    }
    detail::draw_weighted(pool, weights, k - 1, rng, out.robots);
  }
  detail::order_by_completion(out.robots, completion);
  return out;
}

struct TraceRow {
  std::uint64_t iteration = 0;
  double elapsed_ms = 0;
  int k = 0;
  int radius = 0;
  bool accepted = false;
  std::int64_t score = 0;
};

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "iteration,elapsed_ms,k,R,accepted,score\n";
  for (const auto& row : trace) {
    os << row.iteration << ',' << static_cast<std::int64_t>(row.elapsed_ms) << ',' << row.k << ','
       << row.radius << ',' << (row.accepted ? 1 : 0) << ',' << row.score << '\n';
  }
}

struct OptimizeResult {
  Solution solution;
  std::vector<TraceRow> trace;
  std::uint64_t iterations = 0;
  std::uint64_t accepted = 0;
};

/// Incumbent schedule held as trimmed per-robot paths in a reservation table,
/// improved by replanning a few robots at a time against all others.
class Optimizer {
 public:
  Optimizer(const Instance& inst, const Solution& initial, OptimizerConfig cfg)
      : inst_(inst), initial_(initial), cfg_(std::move(cfg)), rng_(cfg_.seed) {
    cfg_.check();
    const ValidationReport report = validate(inst, initial);
    if (!report.ok()) throw Error("optimizer needs a valid schedule: " + format_violation(report.violations.front()));
    std::vector<Cell> used;
    for (const Path& p : initial.paths()) used.insert(used.end(), p.begin(), p.end());
    grid_ = GridIndex::covering(inst, used, default_margin(inst.num_robots()));
    const std::size_t cells = static_cast<std::size_t>(grid_.size());
    const std::size_t capacity = std::clamp<std::size_t>((std::size_t{256} << 20) / (4 * cells), 16, 4096);
    heuristics_.emplace(grid_, HeuristicPolicy::Auto, capacity);
    planner_.emplace(grid_);
    regions_.emplace(grid_);
    const std::size_t n = inst.num_robots();
    table_ = ReservationTable(grid_, n);
    completion_.assign(n, 0);
    moves_.assign(n, 0);
    for (std::size_t r = 0; r < n; ++r) {
      IdPath p;
      for (const Cell& c : initial.path(static_cast<RobotId>(r))) p.push_back(grid_.id(c));
      set_path(static_cast<RobotId>(r), trim_path(std::move(p)));
    }
  }

  [[nodiscard]] std::int64_t sum() const { return std::accumulate(moves_.begin(), moves_.end(), std::int64_t{0}); }
  [[nodiscard]] std::int64_t makespan() const {
    return completion_.empty() ? 0 : *std::max_element(completion_.begin(), completion_.end());
  }
  [[nodiscard]] std::int64_t score() const { return cfg_.objective == Objective::Sum ? sum() : makespan(); }
  [[nodiscard]] std::span<const int> completion() const { return completion_; }
  [[nodiscard]] const GridIndex& grid() const { return grid_; }
  [[nodiscard]] const OptimizerConfig& config() const { return cfg_; }
  std::mt19937_64& rng() { return rng_; }

  [[nodiscard]] Solution solution() const {
    std::vector<Path> paths(inst_.num_robots());
    for (std::size_t r = 0; r < paths.size(); ++r) {
      for (CellId c : table_.path(static_cast<RobotId>(r))) paths[r].push_back(grid_.cell(c));
    }
    return Solution(inst_.name, std::move(paths));
  }

  /// Draws a sample of up to k robots with the configured sampler.
  SampleResult sample(std::size_t k) {
    switch (cfg_.sampler) {
      case SamplerKind::Completion: return sample_completion(completion_, k, rng_);
      case SamplerKind::Closeness: {
        std::vector<Path> cells(inst_.num_robots());
        for (std::size_t r = 0; r < cells.size(); ++r) {
          for (CellId c : table_.path(static_cast<RobotId>(r))) cells[r].push_back(grid_.cell(c));
        }
        return sample_closeness<Path>(cells, completion_, k, rng_);
      }
      case SamplerKind::Constraints: return sample_constraints(k);
    }
    return {};
  }

  /// First robot by completion time plus the robots its relaxed path has to
  /// pass through, using a budget of k-1.
  SampleResult sample_constraints(std::size_t k) {
    SampleResult out;
    out.kind = SamplerKind::Constraints;
    for (int attempt = 0; attempt < 5; ++attempt) {
      out.robots = sample_completion(completion_, 1, rng_).robots;
      if (out.robots.empty() || k <= 1) break;
      const RobotId first = out.robots.front();
      const auto fi = static_cast<std::size_t>(first);
      IdPath old = table_.remove_path(first);
      const CellId start = grid_.id(inst_.starts[fi]);
      const CellId goal = grid_.id(inst_.targets[fi]);
      const auto relaxed = relaxed_path(grid_, start, goal, table_, heuristics_->get(goal),
                                        static_cast<int>(k) - 1, t_max());
      table_.register_path(first, std::move(old));
      if (!relaxed) continue;
      out.robots.insert(out.robots.end(), relaxed->violated.begin(), relaxed->violated.end());
      break;
    }
    detail::order_by_completion(out.robots, completion_);
    return out;
  }

  /// Replans the sampled robots one by one, in the given order, each within the
  /// radius around its old path. Keeps the result only if the score improves.
  bool reroute_ordered(const std::vector<RobotId>& robots) {
    if (robots.empty()) return false;
    const std::int64_t old_sum = sum();
    const std::int64_t old_max = makespan();
    const int limit = t_max();
    std::vector<IdPath> old(robots.size());
    for (std::size_t i = 0; i < robots.size(); ++i) old[i] = clear_path(robots[i]);
    std::size_t placed = 0;
    for (; placed < robots.size(); ++placed) {
      const RobotId r = robots[placed];
      const auto ri = static_cast<std::size_t>(r);
      const CellId goal = grid_.id(inst_.targets[ri]);
      std::optional<RadiusConstraint> region;
      SearchOptions opt;
      opt.objective = cfg_.objective;
      opt.t_max = limit;
      if (cfg_.radius != kUnlimitedRadius) {
        region = regions_->build(old[placed], cfg_.radius);
        opt.radius = &*region;
      }
      auto found = planner_->find_path(grid_.id(inst_.starts[ri]), goal, table_, heuristics_->get(goal), opt);
      if (!found) break;
      set_path(r, trim_path(std::move(found->path)));
    }
    if (placed == robots.size() && improves(old_sum, old_max)) return accept();
    for (std::size_t i = 0; i < placed; ++i) clear_path(robots[i]);
    for (std::size_t i = 0; i < robots.size(); ++i) set_path(robots[i], std::move(old[i]));
    return false;
  }

  /// Replans two robots jointly; keeps the result only if the score improves.
  bool optimize_joint_pair(RobotId r1, RobotId r2) {
    if (r1 == r2) throw Error("joint pair needs two distinct robots");
    const std::int64_t old_sum = sum();
    const std::int64_t old_max = makespan();
    const int limit = t_max();
    IdPath old1 = clear_path(r1);
    IdPath old2 = clear_path(r2);
    std::optional<RadiusConstraint> reg1;
    std::optional<RadiusConstraint> reg2;
    if (cfg_.radius != kUnlimitedRadius) {
      reg1 = regions_->build(old1, cfg_.radius);
      reg2 = regions_->build(old2, cfg_.radius);
    }
    const auto i1 = static_cast<std::size_t>(r1);
    const auto i2 = static_cast<std::size_t>(r2);
    const CellId g1 = grid_.id(inst_.targets[i1]);
    const CellId g2 = grid_.id(inst_.targets[i2]);
    const Heuristic h1 = heuristics_->get(g1);
    const Heuristic h2 = heuristics_->get(g2);
    const JointRobot a{grid_.id(inst_.starts[i1]), g1, &h1, reg1 ? &*reg1 : nullptr};
    const JointRobot b{grid_.id(inst_.starts[i2]), g2, &h2, reg2 ? &*reg2 : nullptr};
    auto found = joint_pair_search(grid_, a, b, table_, cfg_.objective, limit, cfg_.joint_max_expansions);
    if (found) {
      set_path(r1, std::move(found->paths[0]));
      set_path(r2, std::move(found->paths[1]));
      if (improves(old_sum, old_max)) return accept();
      clear_path(r1);
      clear_path(r2);
    }
    set_path(r1, std::move(old1));
    set_path(r2, std::move(old2));
    return false;
  }

  /// Runs the local search until the iteration or time budget is spent.
  OptimizeResult run() {
    OptimizeResult out;
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    const bool limited = cfg_.max_iterations > 0 || cfg_.time_limit > 0;
    std::bernoulli_distribution joint(cfg_.joint_fraction);
    const std::size_t n = inst_.num_robots();
    for (std::uint64_t it = 0; limited && n > 0; ++it) {
      if (cfg_.max_iterations > 0 && it >= cfg_.max_iterations) break;
      if (cfg_.time_limit > 0 && elapsed() >= cfg_.time_limit) break;
      const int k = cfg_.k_schedule[it % cfg_.k_schedule.size()];
      bool accepted = false;
      if (k == 2 && n >= 2 && cfg_.joint_fraction > 0 && joint(rng_)) {
        SampleResult s = sample(2);
        if (s.robots.size() == 2) accepted = optimize_joint_pair(s.robots[0], s.robots[1]);
      } else {
        accepted = reroute_ordered(sample(static_cast<std::size_t>(k)).robots);
      }
      out.accepted += accepted;
      out.iterations = it + 1;
      out.trace.push_back({it, elapsed() * 1000.0, k, cfg_.radius, accepted, score()});
    }
    // Without an accepted move the input is returned as given.
    out.solution = out.accepted > 0 ? solution() : initial_;
    return out;
  }

 private:
  [[nodiscard]] int t_max() const {
    const int m = static_cast<int>(makespan());
    if (cfg_.objective == Objective::Max) return m;
    return m + std::max(cfg_.radius, 16);
  }

  [[nodiscard]] bool improves(std::int64_t old_sum, std::int64_t old_max) const {
    const std::int64_t s = sum();
    if (cfg_.objective == Objective::Sum) return s < old_sum;
    const std::int64_t m = makespan();
    return m < old_max || (m == old_max && s < old_sum);
  }

  bool accept() {
    if (cfg_.check_accepts) {
      const ValidationReport report = validate(inst_, solution());
      if (!report.ok()) throw Error("accepted an invalid schedule: " + format_violation(report.violations.front()));
    }
    return true;
  }

  void set_path(RobotId r, IdPath p) {
    const auto ri = static_cast<std::size_t>(r);
    completion_[ri] = static_cast<int>(p.size()) - 1;
    int m = 0;
    for (std::size_t t = 1; t < p.size(); ++t) m += p[t] != p[t - 1];
    moves_[ri] = m;
    table_.register_path(r, std::move(p));
  }

  IdPath clear_path(RobotId r) {
    const auto ri = static_cast<std::size_t>(r);
    completion_[ri] = 0;
    moves_[ri] = 0;
    return table_.remove_path(r);
  }

  const Instance& inst_;
  Solution initial_;
  OptimizerConfig cfg_;
  std::mt19937_64 rng_;
  GridIndex grid_;
  ReservationTable table_;
  std::optional<HeuristicCache> heuristics_;
  std::optional<PathPlanner> planner_;
  std::optional<RegionBuilder> regions_;
  std::vector<int> completion_;
  std::vector<int> moves_;
};

/// k-opt local search from a valid schedule. The returned schedule is valid
/// and never scores worse than the input.
inline OptimizeResult optimize(const Instance& inst, const Solution& initial, const OptimizerConfig& cfg) {
  Optimizer opt(inst, initial, cfg);
  return opt.run();
}

}  // namespace cmplan
