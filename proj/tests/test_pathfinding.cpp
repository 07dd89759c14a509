#include <gtest/gtest.h>

#include <queue>
#include <random>
#include <set>

#include "cmplan/astar.hpp"
#include "cmplan/bucket_queue.hpp"
#include "cmplan/heuristic.hpp"
#include "cmplan/joint.hpp"
#include "cmplan/relaxed.hpp"
#include "cmplan/reservation.hpp"
#include "test_support.hpp"

namespace cmplan {
namespace {

using testing::box;
using testing::kNone;
using testing::to_cells;
using testing::to_ids;
using testing::Scenario;
using testing::make_scenario;
using testing::table_for;

TEST(BucketQueue, MatchesBinaryHeap) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> prio(0, 200);
  std::bernoulli_distribution do_push(0.55);
  BucketQueue<int> bq;
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> heap;
  for (int op = 0; op < 100000; ++op) {
    if (heap.empty() || do_push(rng)) {
      const std::size_t p = prio(rng);
      bq.push(p, op);
      heap.push(p);
    } else {
      ASSERT_EQ(bq.pop().first, heap.top());
      heap.pop();
    }
    ASSERT_EQ(bq.size(), heap.size());
  }
}

TEST(LayeredBucketQueue, PopsInLexicographicOrder) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> small(0, 30);
  std::bernoulli_distribution do_push(0.55);
  LayeredBucketQueue<int> q;
  using Key = std::pair<std::size_t, std::size_t>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;
  for (int op = 0; op < 100000; ++op) {
    if (heap.empty() || do_push(rng)) {
      const Key k{small(rng), small(rng)};
      q.push(k.first, k.second, op);
      heap.push(k);
    } else {
      auto popped = q.pop();
      ASSERT_EQ(Key(popped.f, popped.t), heap.top());
      heap.pop();
    }
  }
}

TEST(ReservationTable, RegisterRemoveIsIdentity) {
  const GridIndex grid(box(6, 6), std::vector<Cell>{});
  std::mt19937_64 rng(9);
  const auto walks = testing::random_valid_walks(rng, 6, 6, {}, 4, 8);
  ReservationTable table(grid, 5);
  for (std::size_t r = 0; r < 3; ++r) table.register_path(static_cast<RobotId>(r), to_ids(grid, walks[r]));
  const ReservationTable before = table;
  table.register_path(3, to_ids(grid, walks[3]));
  EXPECT_FALSE(table == before);
  EXPECT_EQ(to_cells(grid, table.remove_path(3)), walks[3]);
  EXPECT_TRUE(table == before);
}

TEST(ReservationTable, RejectsSwapAcceptsTrain) {
  const GridIndex grid(box(4, 1), std::vector<Cell>{});
  auto id = [&](int x) { return grid.id({x, 0}); };
  ReservationTable table(grid, 3);
  table.register_path(0, {id(0), id(1)});
  EXPECT_THROW(table.register_path(1, {id(1), id(0)}), ConflictError);
  // The following robot enters the cell the leader leaves.
  table.remove_path(0);
  table.register_path(0, {id(1), id(2)});
  EXPECT_NO_THROW(table.register_path(1, {id(0), id(1)}));
  // Parking on a cell another robot later crosses.
  ReservationTable t2(grid, 2);
  t2.register_path(0, {id(3)});
  EXPECT_THROW(t2.register_path(1, {id(0), id(1), id(2), id(3)}), ConflictError);
  EXPECT_EQ(t2.last_busy(id(3)), kForever);
  EXPECT_EQ(t2.last_busy(id(0)), -1);
}

TEST(ReservationTable, StepLegalMatchesOracle) {
  std::mt19937_64 rng(21);
  const GridIndex grid(box(5, 5), std::vector<Cell>{});
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto walks = testing::random_valid_walks(rng, 5, 5, {}, 6, 6);
    ReservationTable table(grid, walks.size());
    for (std::size_t r = 0; r < walks.size(); ++r)
      table.register_path(static_cast<RobotId>(r), to_ids(grid, walks[r]));
    for (int t = 1; t <= 7; ++t)
      for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x)
          for (int d = 0; d < 5; ++d) {
            const Cell from{x, y};
            const Cell to = from + offset(static_cast<Direction>(d));
            // The moving robot itself sits on `from` at t-1.
            if (!grid.passable(to) || table.occupant(t - 1, grid.id(from)) != kNoRobot) continue;
            EXPECT_EQ(table.step_legal(grid.id(from), grid.id(to), t),
                      testing::oracle_step_ok(walks, from, to, t));
            ++checked;
          }
  }
  EXPECT_GT(checked, 10000);
}

// The found path must be legal against the fixed robots as a whole schedule.
void expect_valid_with(const Scenario& s, const Path& path) {
  std::vector<Path> all = s.fixed;
  all.push_back(path);
  std::vector<Cell> starts;
  std::vector<Cell> goals;
  for (const Path& p : all) {
    starts.push_back(p.front());
    goals.push_back(p.back());
  }
  const Instance inst("scenario", {s.obstacles.begin(), s.obstacles.end()}, starts, goals);
  const auto report = validate(inst, Solution("scenario", all));
  EXPECT_TRUE(report.ok()) << (report.violations.empty() ? "" : format_violation(report.violations[0]));
}

TEST(Astar, MatchesOracleBothObjectives) {
  std::mt19937_64 rng(1234);
  int found = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Scenario s = make_scenario(rng, 6, 6, 0.15, 4, 10);
    const GridIndex grid(box(s.w, s.h), std::vector<Cell>(s.obstacles.begin(), s.obstacles.end()));
    const ReservationTable table = table_for(grid, s.fixed, 1);
    const int t_max = 18;
    const auto oracle = testing::oracle_single(s.w, s.h, s.obstacles, s.fixed, s.start, s.goal, t_max);
    PathPlanner planner(grid);
    const Heuristic h = trial % 2 ? Heuristic::manhattan(grid, grid.id(s.goal))
                                  : Heuristic::obstacle_bfs(grid, grid.id(s.goal));
    for (Objective obj : {Objective::Sum, Objective::Max}) {
      SearchOptions opt;
      opt.objective = obj;
      opt.t_max = t_max;
      const auto r = planner.find_path(grid.id(s.start), grid.id(s.goal), table, h, opt);
      const std::int64_t expected = obj == Objective::Sum ? oracle.sum : oracle.max;
      ASSERT_EQ(r.has_value(), expected != kNone) << "trial " << trial;
      if (!r) continue;
      ++found;
      EXPECT_EQ(r->cost, expected) << "trial " << trial << " " << to_string(obj);
      EXPECT_LE(h(grid.id(s.start)), r->moves) << "admissible";
      EXPECT_EQ(r->path.front(), grid.id(s.start));
      EXPECT_EQ(r->path.back(), grid.id(s.goal));
      expect_valid_with(s, to_cells(grid, r->path));
    }
  }
  EXPECT_GT(found, 200);
}

TEST(Astar, WaitsForCrossingRobot) {
  // Plus-shaped junction: a robot crossing west to east through the centre.
  const std::vector<Cell> corners{{0, 0}, {2, 0}, {0, 2}, {2, 2}};
  const GridIndex grid(box(3, 3), corners);
  ReservationTable table(grid, 2);
  table.register_path(0, {grid.id({0, 1}), grid.id({1, 1}), grid.id({2, 1})});
  const Heuristic h = Heuristic::obstacle_bfs(grid, grid.id({1, 2}));
  SearchOptions opt;
  opt.t_max = 10;
  opt.objective = Objective::Max;
  const auto r = astar(grid, grid.id({1, 0}), grid.id({1, 2}), table, h, opt);
  ASSERT_TRUE(r);
  // t=1 the centre is taken, t=2 entering it would cut across the leaving robot.
  EXPECT_EQ(r->arrival, 4);
  EXPECT_EQ(r->moves, 2);
  opt.objective = Objective::Sum;
  const auto s = astar(grid, grid.id({1, 0}), grid.id({1, 2}), table, h, opt);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->cost, 2);
  EXPECT_EQ(s->arrival, 4);
}

TEST(Astar, RadiusZeroKeepsToOriginalCells) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const Scenario s = make_scenario(rng, 6, 6, 0.1, 3, 8);
    const GridIndex grid(box(s.w, s.h), std::vector<Cell>(s.obstacles.begin(), s.obstacles.end()));
    const ReservationTable table = table_for(grid, s.fixed, 1);
    const Heuristic h = Heuristic::obstacle_bfs(grid, grid.id(s.goal));
    SearchOptions opt;
    opt.t_max = 18;
    const auto free_path = astar(grid, grid.id(s.start), grid.id(s.goal), ReservationTable(grid, 1), h, opt);
    if (!free_path) continue;
    RegionBuilder regions(grid);
    std::int64_t previous = kNone;
    for (int radius : {0, 1, 2, 4}) {
      const RadiusConstraint rc = regions.build(free_path->path, radius);
      std::set<Cell> allowed;
      for (CellId c : rc.allowed) allowed.insert(grid.cell(c));
      if (radius == 0) {
        const Path original = to_cells(grid, free_path->path);
        EXPECT_EQ(allowed, std::set<Cell>(original.begin(), original.end()));
      }
      opt.radius = &rc;
      const auto r = astar(grid, grid.id(s.start), grid.id(s.goal), table, h, opt);
      const auto oracle = testing::oracle_single(s.w, s.h, s.obstacles, s.fixed, s.start, s.goal, 18, &allowed);
      ASSERT_EQ(r.has_value(), oracle.sum != kNone);
      const std::int64_t cost = r ? r->cost : kNone;
      if (r) {
        EXPECT_EQ(cost, oracle.sum);
        for (CellId c : r->path) EXPECT_TRUE(allowed.contains(grid.cell(c)));
      }
      EXPECT_LE(cost, previous) << "larger radius never hurts";
      previous = cost;
    }
  }
}

TEST(Astar, RandomisedModesStayValid) {
  std::mt19937_64 rng(99);
  std::mt19937_64 search_rng(100);
  for (int trial = 0; trial < 60; ++trial) {
    const Scenario s = make_scenario(rng, 6, 6, 0.1, 3, 8);
    const GridIndex grid(box(s.w, s.h), std::vector<Cell>(s.obstacles.begin(), s.obstacles.end()));
    const ReservationTable table = table_for(grid, s.fixed, 1);
    const Heuristic h = Heuristic::obstacle_bfs(grid, grid.id(s.goal));
    const auto oracle = testing::oracle_single(s.w, s.h, s.obstacles, s.fixed, s.start, s.goal, 18);
    for (PathRandomization mode : {PathRandomization::RandomShortest, PathRandomization::Approximate}) {
      SearchOptions opt;
      opt.t_max = 18;
      opt.randomization = mode;
      opt.rng = &search_rng;
      const auto r = astar(grid, grid.id(s.start), grid.id(s.goal), table, h, opt);
      if (!r) continue;
      if (mode == PathRandomization::RandomShortest) {
        EXPECT_EQ(r->cost, oracle.sum);
      }
      EXPECT_GE(r->cost, oracle.sum);
      expect_valid_with(s, to_cells(grid, r->path));
    }
  }
}

TEST(Relaxed, BudgetZeroEqualsMakespanSearch) {
  std::mt19937_64 rng(4321);
  int compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Scenario s = make_scenario(rng, 6, 6, 0.15, 4, 10);
    const GridIndex grid(box(s.w, s.h), std::vector<Cell>(s.obstacles.begin(), s.obstacles.end()));
    const ReservationTable table = table_for(grid, s.fixed, 1);
    const Heuristic h = Heuristic::obstacle_bfs(grid, grid.id(s.goal));
    SearchOptions opt;
    opt.objective = Objective::Max;
    opt.t_max = 18;
    const auto a = astar(grid, grid.id(s.start), grid.id(s.goal), table, h, opt);
    const auto r = relaxed_path(grid, grid.id(s.start), grid.id(s.goal), table, h, 0, 18);
    ASSERT_EQ(a.has_value(), r.has_value());
    if (!a) continue;
    EXPECT_EQ(r->path, a->path);
    EXPECT_TRUE(r->violated.empty());
    ++compared;
  }
  EXPECT_GT(compared, 50);
}

TEST(Relaxed, PassesThroughCorridorBlocker) {
  // A one-wide corridor with a robot parked in the middle.
  std::vector<Cell> walls;
  for (int x = 0; x < 7; ++x) {
    walls.push_back({x, 1});
  }
  const GridIndex grid(Rect{0, 0, 6, 1}, walls);
  ReservationTable table(grid, 2);
  table.register_path(0, {grid.id({3, 0})});
  const Heuristic h = Heuristic::obstacle_bfs(grid, grid.id({6, 0}));
  SearchOptions opt;
  opt.t_max = 20;
  EXPECT_FALSE(astar(grid, grid.id({0, 0}), grid.id({6, 0}), table, h, opt));
  EXPECT_FALSE(relaxed_path(grid, grid.id({0, 0}), grid.id({6, 0}), table, h, 0, 20));
  const auto r = relaxed_path(grid, grid.id({0, 0}), grid.id({6, 0}), table, h, 1, 20);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->violated, std::vector<RobotId>{0});
  EXPECT_EQ(r->arrival, 6);
  EXPECT_EQ(r->moves, 6);
}

TEST(Relaxed, MatchesSubsetRemovalOracle) {
  std::mt19937_64 rng(8080);
  int compared = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const Scenario s = make_scenario(rng, 7, 7, 0.15, 5, 8);
    const GridIndex grid(box(s.w, s.h), std::vector<Cell>(s.obstacles.begin(), s.obstacles.end()));
    const ReservationTable table = table_for(grid, s.fixed, 1);
    const Heuristic h = Heuristic::obstacle_bfs(grid, grid.id(s.goal));
    const int budget = 2;
    const int t_max = 16;
    // Earliest arrival over all ways to delete at most `budget` fixed robots.
    std::int64_t best = kNone;
    const std::size_t k = s.fixed.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
      if (std::popcount(mask) > budget) continue;
      std::vector<Path> kept;
      for (std::size_t i = 0; i < k; ++i)
        if (!(mask >> i & 1)) kept.push_back(s.fixed[i]);
      best = std::min(best, testing::oracle_single(s.w, s.h, s.obstacles, kept, s.start, s.goal, t_max).max);
    }
    const auto r = relaxed_path(grid, grid.id(s.start), grid.id(s.goal), table, h, budget, t_max);
    ASSERT_EQ(r.has_value(), best != kNone) << "trial " << trial;
    if (!r) continue;
    EXPECT_EQ(r->arrival, best);
    EXPECT_LE(static_cast<int>(r->violated.size()), budget);
    Scenario rest = s;
    rest.fixed.clear();
    for (std::size_t i = 0; i < k; ++i) {
      if (!std::binary_search(r->violated.begin(), r->violated.end(), static_cast<RobotId>(i))) {
        rest.fixed.push_back(s.fixed[i]);
      }
    }
    expect_valid_with(rest, to_cells(grid, r->path));
    ++compared;
  }
  EXPECT_GT(compared, 20);
}

TEST(JointPair, MatchesPairOracle) {
  std::mt19937_64 rng(606);
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Scenario s = make_scenario(rng, 4, 4, 0.1, 2, 5);
    std::set<Cell> blocked = s.obstacles;
    for (const Path& p : s.fixed) blocked.insert(p.front());
    blocked.insert(s.start);
    const auto extra = testing::random_free_cells(rng, 4, 4, blocked, 2);
    if (extra.size() < 2 || extra[1] == s.goal) continue;
    const Cell s2 = extra[0];
    const Cell g2 = extra[1];
    const GridIndex grid(box(s.w, s.h), std::vector<Cell>(s.obstacles.begin(), s.obstacles.end()));
    const ReservationTable table = table_for(grid, s.fixed, 2);
    const Heuristic h1 = Heuristic::obstacle_bfs(grid, grid.id(s.goal));
    const Heuristic h2 = Heuristic::obstacle_bfs(grid, grid.id(g2));
    const int t_max = 10;
    const auto oracle =
        testing::oracle_pair(s.w, s.h, s.obstacles, s.fixed, s.start, s.goal, s2, g2, t_max);
    for (Objective obj : {Objective::Sum, Objective::Max}) {
      const JointRobot a{grid.id(s.start), grid.id(s.goal), &h1, nullptr};
      const JointRobot b{grid.id(s2), grid.id(g2), &h2, nullptr};
      const auto r = joint_pair_search(grid, a, b, table, obj, t_max);
      const std::int64_t expected = obj == Objective::Sum ? oracle.sum : oracle.max;
      ASSERT_EQ(r.has_value(), expected != kNone) << "trial " << trial;
      if (!r) continue;
      EXPECT_EQ(r->cost, expected) << "trial " << trial << " " << to_string(obj);
      std::vector<Path> all = s.fixed;
      all.push_back(to_cells(grid, r->paths[0]));
      all.push_back(to_cells(grid, r->paths[1]));
      std::vector<Cell> starts;
      std::vector<Cell> goals;
      for (const Path& p : all) {
        starts.push_back(p.front());
        goals.push_back(p.back());
      }
      EXPECT_EQ(goals[goals.size() - 2], s.goal);
      EXPECT_EQ(goals.back(), g2);
      const Instance inst("pair", {s.obstacles.begin(), s.obstacles.end()}, starts, goals);
      EXPECT_TRUE(validate(inst, Solution("pair", all)).ok());
      ++compared;
    }
  }
  EXPECT_GT(compared, 30);
}

}  // namespace
}  // namespace cmplan
