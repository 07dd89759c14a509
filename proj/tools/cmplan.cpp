// cmplan: solve, validate, score, render and benchmark grid motion plans.
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cmplan/commands.hpp"

namespace {

using namespace cmplan;

int parse_radius(const std::string& s) {
  if (s == "inf" || s == "unlimited") return kUnlimitedRadius;
  std::size_t used = 0;
  const int r = std::stoi(s, &used);
  if (used != s.size() || r < 0) throw Error("bad radius '" + s + "'");
  return r;
}

struct SearchFlags {
  std::string objective = "distance";
  std::string k_schedule = "1..7";
  std::string radius = "20";
  std::string sampler = "completion";
  std::size_t portfolio = 1;
  std::uint64_t seed = 0;
  double time_limit = 0;
  std::uint64_t iterations = 1000;
  double joint_fraction = 0.1;
  unsigned threads = 1;

  void add(CLI::App* app, bool single_schedule) {
    app->add_option("--objective", objective, "distance (SUM) or makespan (MAX)")
        ->check(CLI::IsMember({"distance", "makespan", "sum", "max"}));
    if (single_schedule) {
      app->add_option("--k-schedule", k_schedule, "k values cycled by the optimizer, e.g. 1..7 or 1,2,5");
      app->add_option("--radius", radius, "reroute radius, or inf");
    }
    app->add_option("--sampler", sampler, "robot sampler")
        ->check(CLI::IsMember({"completion", "closeness", "constraints"}));
    app->add_option("--portfolio", portfolio, "number of initializer configurations to try")
        ->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "random seed");
    app->add_option("--time-limit", time_limit, "optimizer wall-clock limit in seconds (0 = none)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--iterations", iterations, "optimizer iteration limit (0 = none)");
    app->add_option("--joint-fraction", joint_fraction, "share of k=2 iterations using the joint pair search")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  }

  [[nodiscard]] cli::SolveOptions options() const {
    cli::SolveOptions o;
    o.objective = parse_objective(objective);
    o.portfolio = portfolio;
    o.seed = seed;
    o.threads = threads;
    o.optimizer.k_schedule = parse_k_schedule(k_schedule);
    o.optimizer.radius = parse_radius(radius);
    o.optimizer.sampler = parse_sampler(sampler);
    o.optimizer.max_iterations = iterations;
    o.optimizer.time_limit = time_limit;
    o.optimizer.joint_fraction = joint_fraction;
    o.optimizer.check();
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinated motion planning for unit robots on a grid"};
  app.require_subcommand(1);

  SearchFlags solve_flags;
  std::string solve_instance, solve_out, solve_trace, solve_report;
  auto* solve = app.add_subcommand("solve", "compute a schedule for an instance");
  solve->add_option("instance", solve_instance, "instance JSON")->required();
  solve_flags.add(solve, true);
  solve->add_option("--out", solve_out, "solution JSON to write");
  solve->add_option("--trace", solve_trace, "optimizer trace CSV to write");
  solve->add_option("--portfolio-report", solve_report, "per-configuration initializer results as JSON");

  std::string val_instance, val_solution;
  auto* validate_cmd = app.add_subcommand("validate", "check a solution against an instance");
  validate_cmd->add_option("instance", val_instance)->required();
  validate_cmd->add_option("solution", val_solution)->required();

  std::string score_instance, score_solution;
  auto* score_cmd = app.add_subcommand("score", "print SUM, MAX and lower bounds of a solution");
  score_cmd->add_option("instance", score_instance)->required();
  score_cmd->add_option("solution", score_solution)->required();

  cli::RenderOptions render_opts;
  std::string render_mode = "start";
  auto* render = app.add_subcommand("render", "draw an instance or a solution frame as SVG");
  render->add_option("instance", render_opts.instance)->required();
  render->add_option("solution", render_opts.solution, "needed for frame mode");
  render->add_option("--mode", render_mode, "start, target or frame")
      ->check(CLI::IsMember({"start", "target", "frame", "start-intermediate", "target-intermediate"}));
  render->add_option("--t", render_opts.t, "timestep for frame mode");
  render->add_option("--seed", render_opts.init.seed, "initializer seed for the matching modes");
  render->add_option("--out", render_opts.out, "SVG file (stdout when omitted)");

  SearchFlags bench_flags;
  std::string bench_corpus, bench_out;
  std::vector<std::string> bench_k{"1..7"};
  std::vector<std::string> bench_r{"20"};
  auto* bench = app.add_subcommand("bench", "solve every instance of a directory and write CSV rows");
  bench->add_option("corpus", bench_corpus, "directory of instance JSON files")->required();
  bench_flags.add(bench, false);
  bench->add_option("--k-schedule", bench_k, "one or more k schedules; configs are their product with --radius");
  bench->add_option("--radius", bench_r, "one or more radii");
  bench->add_option("--out", bench_out, "CSV file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitUsage;
  }

  try {
    if (*solve) {
      cli::SolveOptions o = solve_flags.options();
      o.instance = solve_instance;
      o.out = solve_out;
      o.trace = solve_trace;
      o.portfolio_report = solve_report;
      return cli::cmd_solve(o, std::cout, std::cerr);
    }
    if (*validate_cmd) return cli::cmd_validate(val_instance, val_solution, std::cout, std::cerr);
    if (*score_cmd) return cli::cmd_score(score_instance, score_solution, std::cout, std::cerr);
    if (*render) {
      render_opts.mode = cli::parse_render_mode(render_mode);
      return cli::cmd_render(render_opts, std::cout, std::cerr);
    }
    if (*bench) {
      cli::BenchOptions o;
      o.corpus = bench_corpus;
      o.solve = bench_flags.options();
      o.workers = bench_flags.threads;
      o.configs.clear();
      for (const auto& k : bench_k) {
        for (const auto& r : bench_r) o.configs.push_back({parse_k_schedule(k), parse_radius(r)});
      }
      if (bench_out.empty()) return cli::cmd_bench(o, std::cout, std::cerr);
      std::ofstream file(bench_out);
      if (!file) {
        std::cerr << "cannot write '" << bench_out << "'\n";
        return cli::kExitUsage;
      }
      return cli::cmd_bench(o, file, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return cli::kExitUsage;
  }
  return cli::kExitUsage;
}
