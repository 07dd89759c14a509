#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cmplan/initializer.hpp"
#include "cmplan/optimizer.hpp"
#include "cmplan/score.hpp"
#include "test_support.hpp"

namespace cmplan {
namespace {

using testing::kNone;
using testing::random_instance;
using testing::chi_square;
using testing::chi_square_critical;

TEST(CompletionTime, Examples) {
  const Solution still("s", {{{0, 0}}});
  EXPECT_EQ(completion_time(still, 0), 0);
  // E, wait, N.
  const Solution s("s", {{{0, 0}, {1, 0}, {1, 0}, {1, 1}}});
  EXPECT_EQ(completion_time(s, 0), 3);
}

TEST(CompletionTime, MatchesStepScan) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto walks = testing::random_valid_walks(rng, 6, 6, {}, 5, 9);
    const Solution s("w", walks);
    const auto steps = s.steps();
    for (std::size_t r = 0; r < walks.size(); ++r) {
      int last = 0;
      for (std::size_t i = 0; i < steps.size(); ++i)
        if (steps[i].contains(static_cast<RobotId>(r))) last = static_cast<int>(i) + 1;
      EXPECT_EQ(completion_time(s, static_cast<RobotId>(r)), last);
    }
  }
}

TEST(PathProximity, Examples) {
  const Path p{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}};
  EXPECT_EQ(path_proximity(p, p), 7);
  const Path far{{0, 5}, {1, 5}, {2, 5}};
  EXPECT_EQ(path_proximity(p, far), 0);
  // Parallel one row up, stopping at x=3: distances 1,1,1,1,2,3,4.
  const Path q{{0, 1}, {1, 1}, {2, 1}, {3, 1}};
  EXPECT_EQ(path_proximity(p, q), 4);
  EXPECT_EQ(path_proximity(q, p), 4);
}

TEST(SampleCompletion, Examples) {
  std::mt19937_64 rng(1);
  const std::vector<int> c{4, 0, 2};
  auto all = sample_completion(c, 3, rng).robots;
  EXPECT_EQ(all, (std::vector<RobotId>{0, 2, 1})) << "ordered by decreasing completion";
  EXPECT_EQ(sample_completion(c, 10, rng).robots.size(), 3u);
  const std::vector<int> one{0, 5, 0};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_completion(one, 1, rng).robots, std::vector<RobotId>{1});
}

TEST(SampleCompletion, ChiSquareWithoutReplacement) {
  std::mt19937_64 rng(2024);
  const std::vector<int> c{1, 2, 3};
  const int draws = 100000;
  // Single draws: probability w_i / W.
  std::map<std::vector<RobotId>, int> singles;
  for (int i = 0; i < draws; ++i) ++singles[sample_completion(c, 1, rng).robots];
  const std::map<std::vector<RobotId>, double> single_p{{{0}, 1.0 / 6}, {{1}, 2.0 / 6}, {{2}, 3.0 / 6}};
  EXPECT_LT(chi_square(singles, single_p, draws), chi_square_critical(2));
  // Pairs: P{i,j} = w_i/W * w_j/(W-w_i) + w_j/W * w_i/(W-w_j); keys are ordered
  // by decreasing completion.
  auto pair_p = [](double wi, double wj) { return wi / 6 * wj / (6 - wi) + wj / 6 * wi / (6 - wj); };
  std::map<std::vector<RobotId>, int> pairs;
  for (int i = 0; i < draws; ++i) ++pairs[sample_completion(c, 2, rng).robots];
  const std::map<std::vector<RobotId>, double> pair_probs{
      {{1, 0}, pair_p(1, 2)}, {{2, 0}, pair_p(1, 3)}, {{2, 1}, pair_p(2, 3)}};
  EXPECT_LT(chi_square(pairs, pair_probs, draws), chi_square_critical(2));
}

TEST(SampleCompletion, ZeroWeightsFallBackToUniform) {
  std::mt19937_64 rng(5);
  const std::vector<int> c{0, 0, 0};
  const int draws = 30000;
  std::map<std::vector<RobotId>, int> seen;
  for (int i = 0; i < draws; ++i) ++seen[sample_completion(c, 1, rng).robots];
  const std::map<std::vector<RobotId>, double> uniform{{{0}, 1.0 / 3}, {{1}, 1.0 / 3}, {{2}, 1.0 / 3}};
  EXPECT_LT(chi_square(seen, uniform, draws), chi_square_critical(2));
}

TEST(SampleCloseness, KOneMatchesCompletionSampler) {
  const std::vector<Path> paths{{{0, 0}, {1, 0}}, {{5, 5}, {5, 6}, {5, 7}}, {{9, 9}}};
  const std::vector<int> c{1, 2, 0};
  std::mt19937_64 a(77);
  std::mt19937_64 b(77);
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(sample_closeness<Path>(paths, c, 1, a).robots, sample_completion(c, 1, b).robots);
  }
}

TEST(SampleCloseness, ProximityWeightsAndFallback) {
  // Robot 0 is the only one that moves, so it is always drawn first.
  const std::vector<Path> paths{
      {{0, 0}, {1, 0}, {2, 0}, {3, 0}},
      {{0, 1}, {1, 1}, {2, 1}},
      {{3, 1}},
      {{9, 9}},
  };
  const std::vector<int> c{3, 0, 0, 0};
  std::mt19937_64 rng(31);
  const int draws = 100000;
  std::map<std::vector<RobotId>, int> seen;
  for (int i = 0; i < draws; ++i) ++seen[sample_closeness<Path>(paths, c, 2, rng).robots];
  // By direct enumeration: robot 1 is within distance 1 at t=0,1,2 and robot 2
  // only at t=3.
  ASSERT_EQ(path_proximity(paths[0], paths[1]), 3);
  ASSERT_EQ(path_proximity(paths[0], paths[2]), 1);
  ASSERT_EQ(path_proximity(paths[0], paths[3]), 0);
  const std::map<std::vector<RobotId>, double> expected{{{0, 1}, 0.75}, {{0, 2}, 0.25}};
  EXPECT_EQ(seen.count({0, 3}), 0u);
  EXPECT_LT(chi_square(seen, expected, draws), chi_square_critical(1));
  // All proximities zero: uniform among the others.
  const std::vector<Path> apart{{{0, 0}, {1, 0}}, {{9, 9}}, {{-9, 9}}, {{9, -9}}};
  std::map<std::vector<RobotId>, int> uni;
  const std::vector<int> c2{1, 0, 0, 0};
  for (int i = 0; i < 30000; ++i) ++uni[sample_closeness<Path>(apart, c2, 2, rng).robots];
  const std::map<std::vector<RobotId>, double> third{{{0, 1}, 1.0 / 3}, {{0, 2}, 1.0 / 3}, {{0, 3}, 1.0 / 3}};
  EXPECT_LT(chi_square(uni, third, 30000), chi_square_critical(2));
}

// A corridor x=0..6 along y=0 with a detour loop through y=2. Robot 1 sits at
// (3,0) and never moves; robot 0 currently takes the detour.
Instance corridor_with_loop() {
  std::vector<Cell> obstacles;
  for (int x = -1; x <= 7; ++x) {
    obstacles.push_back({x, -1});
    obstacles.push_back({x, 3});
  }
  for (int y = 0; y <= 2; ++y) {
    obstacles.push_back({-1, y});
    obstacles.push_back({7, y});
  }
  for (int x = 1; x <= 5; ++x) obstacles.push_back({x, 1});
  return Instance("loop", obstacles, {{0, 0}, {3, 0}}, {{6, 0}, {3, 0}});
}

TEST(SampleConstraints, CorridorBlockerIsSampled) {
  const Instance inst = corridor_with_loop();
  const Path detour{{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}, {3, 2}, {4, 2}, {5, 2}, {6, 2}, {6, 1}, {6, 0}};
  const Solution s("loop", {detour, {{3, 0}}});
  ASSERT_TRUE(validate(inst, s).ok());
  OptimizerConfig cfg;
  cfg.sampler = SamplerKind::Constraints;
  Optimizer opt(inst, s, cfg);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(opt.sample_constraints(2).robots, (std::vector<RobotId>{0, 1}));
    EXPECT_EQ(opt.sample_constraints(1).robots, std::vector<RobotId>{0});
  }
}

TEST(RerouteOrdered, RemovesDetour) {
  const Instance inst("d", {}, {{0, 0}}, {{3, 0}});
  const Solution s("d", {{{0, 0}, {0, 1}, {1, 1}, {2, 1}, {3, 1}, {3, 0}}});
  Optimizer opt(inst, s, OptimizerConfig{});
  EXPECT_EQ(opt.sum(), 5);
  EXPECT_TRUE(opt.reroute_ordered({0}));
  EXPECT_EQ(opt.sum(), 3);
  EXPECT_EQ(score(inst, opt.solution(), Objective::Sum), 3);
  EXPECT_FALSE(opt.reroute_ordered({0})) << "no further improvement";
  EXPECT_EQ(opt.sum(), 3);
}

TEST(RerouteOrdered, InfeasibleOrderIsRejected) {
  // Dead-end corridor x=0..2: robot 1 must leave past robot 0, whose target
  // (2,0) lies on the only way out.
  std::vector<Cell> obstacles{{-1, 0}};
  for (int x = 0; x <= 2; ++x) {
    obstacles.push_back({x, 1});
    obstacles.push_back({x, -1});
  }
  const Instance inst("dead", obstacles, {{1, 0}, {0, 0}}, {{2, 0}, {5, 0}});
  const Solution s("dead", {{{1, 0}, {2, 0}, {3, 0}, {3, 1}, {3, 1}, {3, 1}, {3, 1}, {3, 0}, {2, 0}},
                            {{0, 0}, {1, 0}, {2, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}}});
  ASSERT_TRUE(validate(inst, s).ok());
  OptimizerConfig cfg;
  cfg.radius = kUnlimitedRadius;
  Optimizer opt(inst, s, cfg);
  const Solution before = opt.solution();
  EXPECT_FALSE(opt.reroute_ordered({0, 1}));
  EXPECT_EQ(opt.solution(), before);
  EXPECT_EQ(opt.sum(), 10);
}

// 5x3 box: a corridor along y=1 with a single pocket at (2,2).
Instance head_on() {
  std::vector<Cell> obstacles;
  for (int x = -1; x <= 5; ++x) {
    obstacles.push_back({x, -1});
    obstacles.push_back({x, 3});
  }
  for (int y = 0; y <= 2; ++y) {
    obstacles.push_back({-1, y});
    obstacles.push_back({5, y});
  }
  for (int x = 0; x <= 4; ++x) {
    obstacles.push_back({x, 0});
    if (x != 2) obstacles.push_back({x, 2});
  }
  return Instance("head-on", obstacles, {{0, 1}, {4, 1}}, {{4, 1}, {0, 1}});
}

TEST(JointPair, HeadOnSidestep) {
  const Instance inst = head_on();
  // Robot 1 shuffles back and forth before passing the pocket.
  const Solution s("head-on", {{{0, 1}, {1, 1}, {2, 1}, {2, 2}, {2, 2}, {2, 2}, {2, 2}, {2, 1}, {3, 1}, {4, 1}},
                               {{4, 1}, {3, 1}, {4, 1}, {3, 1}, {2, 1}, {1, 1}, {0, 1}}});
  ASSERT_TRUE(validate(inst, s).ok());
  std::set<Cell> inner;
  for (const Cell& c : inst.obstacles)
    if (c.x >= 0 && c.x < 5 && c.y >= 0 && c.y < 3) inner.insert(c);
  const auto oracle = testing::oracle_pair(5, 3, inner, {}, {0, 1}, {4, 1}, {4, 1}, {0, 1}, 20);
  ASSERT_NE(oracle.sum, kNone);
  OptimizerConfig cfg;
  cfg.radius = kUnlimitedRadius;
  Optimizer opt(inst, s, cfg);
  EXPECT_FALSE(opt.reroute_ordered({0, 1}));
  EXPECT_FALSE(opt.reroute_ordered({1, 0}));
  EXPECT_TRUE(opt.optimize_joint_pair(0, 1));
  EXPECT_EQ(opt.sum(), oracle.sum);
  EXPECT_TRUE(validate(inst, opt.solution()).ok());
}

TEST(JointPair, SeparableRobotsMatchIndependentSearches) {
  const Instance inst("far", {}, {{0, 0}, {20, 20}}, {{4, 3}, {17, 22}});
  const Solution s = initialize(inst);
  OptimizerConfig cfg;
  cfg.radius = kUnlimitedRadius;
  Optimizer opt(inst, s, cfg);
  opt.optimize_joint_pair(0, 1);
  EXPECT_EQ(opt.sum(), 7 + 5);
}

TEST(JointPair, MatchesOracleOnWalledBoards) {
  int compared = 0;
  for (std::uint64_t seed = 0; compared < 30 && seed < 200; ++seed) {
    const Instance inst = testing::walled_instance(seed, 5, 5, 2, 0.15);
    const auto start = testing::prioritized_schedule(inst, 30);
    if (!start) continue;
    std::set<Cell> inner;
    for (const Cell& c : inst.obstacles)
      if (c.x >= 0 && c.x < 5 && c.y >= 0 && c.y < 5) inner.insert(c);
    const auto oracle = testing::oracle_pair(5, 5, inner, {}, inst.starts[0], inst.targets[0], inst.starts[1],
                                             inst.targets[1], 25);
    for (Objective obj : {Objective::Sum, Objective::Max}) {
      OptimizerConfig cfg;
      cfg.objective = obj;
      cfg.radius = kUnlimitedRadius;
      Optimizer opt(inst, *start, cfg);
      opt.optimize_joint_pair(0, 1);
      EXPECT_EQ(opt.score(), obj == Objective::Sum ? oracle.sum : oracle.max) << "seed " << seed;
      EXPECT_TRUE(validate(inst, opt.solution()).ok());
    }
    ++compared;
  }
  EXPECT_EQ(compared, 30);
}

TEST(Optimize, SmallBoardsReachJointOptimum) {
  int compared = 0;
  for (std::uint64_t seed = 1000; compared < 20 && seed < 1200; ++seed) {
    const Instance inst = testing::walled_instance(seed, 5, 5, 2, 0.15);
    const auto start = testing::prioritized_schedule(inst, 30);
    if (!start) continue;
    std::set<Cell> inner;
    for (const Cell& c : inst.obstacles)
      if (c.x >= 0 && c.x < 5 && c.y >= 0 && c.y < 5) inner.insert(c);
    const auto oracle = testing::oracle_pair(5, 5, inner, {}, inst.starts[0], inst.targets[0], inst.starts[1],
                                             inst.targets[1], 25);
    for (Objective obj : {Objective::Sum, Objective::Max}) {
      OptimizerConfig cfg;
      cfg.objective = obj;
      cfg.k_schedule = {1, 2};
      cfg.joint_fraction = 0.5;
      cfg.max_iterations = 100;
      cfg.seed = seed;
      const OptimizeResult r = optimize(inst, *start, cfg);
      EXPECT_EQ(score(inst, r.solution, obj), obj == Objective::Sum ? oracle.sum : oracle.max) << "seed " << seed;
    }
    ++compared;
  }
  EXPECT_EQ(compared, 20);
}

TEST(Optimize, ZeroBudgetReturnsInput) {
  const Instance inst = random_instance(3, 8, 8, 10, 0.1);
  const Solution s = initialize(inst);
  OptimizerConfig cfg;
  const OptimizeResult r = optimize(inst, s, cfg);
  EXPECT_EQ(r.solution, s);
  EXPECT_TRUE(r.trace.empty());
}

TEST(Optimize, MonotoneTraceAndValidAccepts) {
  for (SamplerKind sampler : {SamplerKind::Completion, SamplerKind::Closeness, SamplerKind::Constraints}) {
    for (Objective obj : {Objective::Sum, Objective::Max}) {
      const Instance inst = random_instance(17, 10, 10, 25, 0.1);
      const Solution s = initialize(inst);
      OptimizerConfig cfg;
      cfg.objective = obj;
      cfg.sampler = sampler;
      cfg.max_iterations = 300;
      cfg.check_accepts = true;
      cfg.seed = 4;
      const OptimizeResult r = optimize(inst, s, cfg);
      ASSERT_EQ(r.trace.size(), 300u);
      std::int64_t prev = score(inst, s, obj);
      for (const TraceRow& row : r.trace) {
        EXPECT_LE(row.score, prev);
        if (!row.accepted) {
          EXPECT_EQ(row.score, prev);
        }
        prev = row.score;
      }
      EXPECT_EQ(score(inst, r.solution, obj), prev);
    }
  }
}

TEST(Optimize, DeterministicForSeed) {
  const Instance inst = random_instance(23, 10, 10, 20, 0.1);
  const Solution s = initialize(inst);
  OptimizerConfig cfg;
  cfg.max_iterations = 200;
  cfg.seed = 9;
  EXPECT_EQ(optimize(inst, s, cfg).solution, optimize(inst, s, cfg).solution);
}

TEST(Optimize, TraceCsv) {
  std::ostringstream os;
  write_trace_csv(os, {{0, 1.5, 1, 20, true, 10}, {1, 2.0, 2, 20, false, 10}});
  EXPECT_EQ(os.str(), "iteration,elapsed_ms,k,R,accepted,score\n0,1,1,20,1,10\n1,2,2,20,0,10\n");
}

TEST(Optimize, ParseKSchedule) {
  EXPECT_EQ(parse_k_schedule("1..7"), (std::vector<int>{1, 2, 3, 4, 5, 6, 7}));
  EXPECT_EQ(parse_k_schedule("3"), std::vector<int>{3});
  EXPECT_EQ(parse_k_schedule("1,2,5"), (std::vector<int>{1, 2, 5}));
  EXPECT_THROW(parse_k_schedule("0..3"), Error);
  EXPECT_THROW(parse_k_schedule("a"), Error);
  EXPECT_THROW(parse_k_schedule("1,,2"), Error);
}

TEST(Optimize, UnlimitedRadiusNoWorseThanZero) {
  const Instance inst = random_instance(31, 10, 10, 30, 0.1);
  const Solution s = initialize(inst);
  OptimizerConfig cfg;
  cfg.max_iterations = 2000;
  cfg.seed = 1;
  cfg.radius = 0;
  const std::int64_t narrow = score(inst, optimize(inst, s, cfg).solution, Objective::Sum);
  cfg.radius = kUnlimitedRadius;
  const std::int64_t wide = score(inst, optimize(inst, s, cfg).solution, Objective::Sum);
  EXPECT_LE(wide, narrow);
}

TEST(Optimize, ImprovesDenseInstance) {
  const Instance inst = random_instance(2021, 10, 10, 30, 0.0);
  InitConfig init;
  const Solution s = initialize(inst, init);
  OptimizerConfig cfg;
  cfg.max_iterations = 10000;
  cfg.seed = 7;
  const OptimizeResult r = optimize(inst, s, cfg);
  const std::int64_t before = score(inst, s, Objective::Sum);
  const std::int64_t after = score(inst, r.solution, Objective::Sum);
  const std::int64_t lb = lower_bound(inst, Objective::Sum);
  EXPECT_LE(after * 10, before * 9);
  EXPECT_GE(after, lb);
}

}  // namespace
}  // namespace cmplan
