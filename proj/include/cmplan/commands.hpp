#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cmplan/initializer.hpp"
#include "cmplan/io.hpp"
#include "cmplan/optimizer.hpp"
#include "cmplan/score.hpp"
#include "cmplan/svg.hpp"
#include "cmplan/validate.hpp"

namespace cmplan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUsage = 2;

struct SolveOptions {
  std::string instance;
  Objective objective = Objective::Sum;
  std::size_t portfolio = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  OptimizerConfig optimizer = default_optimizer();
  std::string out;
  std::string trace;
  std::string portfolio_report;

  static OptimizerConfig default_optimizer() {
    OptimizerConfig cfg;
    cfg.max_iterations = 1000;
    return cfg;
  }
};

struct SolveResult {
  Solution initial;
  Solution solution;
  std::vector<PortfolioEntry> portfolio;
  OptimizeResult optimized;
  LowerBounds lb;
  std::int64_t sum = 0;
  std::int64_t max = 0;
  double seconds = 0;
};

/// `-` when the lower bound is zero, since the ratio is then undefined.
inline std::string format_ratio(std::int64_t value, std::int64_t lb) {
  if (lb == 0) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << static_cast<double>(value) / static_cast<double>(lb);
  return os.str();
}

inline std::string format_seconds(double s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << s;
  return os.str();
}

/// `instance sum max lb_sum lb_max ratio_sum ratio_max seconds`
inline std::string summary_line(const std::string& name, std::int64_t sum, std::int64_t max,
                                const LowerBounds& lb, const std::string& seconds) {
  std::ostringstream os;
  os << (name.empty() ? "-" : name) << ' ' << sum << ' ' << max << ' ' << lb.sum << ' ' << lb.max << ' '
     << format_ratio(sum, lb.sum) << ' ' << format_ratio(max, lb.max) << ' ' << seconds;
  return os.str();
}

/// Initialization (portfolio with fallback) followed by local search.
inline SolveResult run_solve(const Instance& inst, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult res;
  res.lb = lower_bounds(inst);
  res.portfolio = portfolio_with_fallback(inst, std::max<std::size_t>(opts.portfolio, 1), opts.seed,
                                          opts.objective, opts.threads);
  res.initial = *res.portfolio.front().solution;
  OptimizerConfig cfg = opts.optimizer;
  cfg.objective = opts.objective;
  cfg.seed = opts.seed;
  if (cfg.max_iterations > 0 || cfg.time_limit > 0) {
    res.optimized = optimize(inst, res.initial, cfg);
  } else {
    res.optimized.solution = res.initial;
  }
  res.solution = res.optimized.solution.compacted();
  const ValidationReport report = validate(inst, res.solution);
  if (!report.ok()) throw Error("solver produced an invalid schedule: " + format_violation(report.violations.front()));
  res.sum = score_unchecked(res.solution, Objective::Sum);
  res.max = score_unchecked(res.solution, Objective::Max);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

namespace detail {

inline std::optional<Instance> load_instance(const std::string& path, std::ostream& err) {
  try {
    return parse_instance(read_file(path));
  } catch (const std::exception& e) {
    err << path << ": " << e.what() << '\n';
    return std::nullopt;
  }
}

inline std::optional<Solution> load_solution(const std::string& path, const Instance& inst, std::ostream& err) {
  try {
    std::vector<std::string> warnings;
    Solution s = parse_solution(read_file(path), inst, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    return s;
  } catch (const std::exception& e) {
    err << path << ": " << e.what() << '\n';
    return std::nullopt;
  }
}

inline std::string display_name(const Instance& inst, const std::string& path) {
  return inst.name.empty() ? std::filesystem::path(path).stem().string() : inst.name;
}

}  // namespace detail

inline int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err) {
  const auto inst = detail::load_instance(opts.instance, err);
  if (!inst) return kExitUsage;
  SolveResult res;
  try {
    res = run_solve(*inst, opts);
  } catch (const std::exception& e) {
    err << "solve failed: " << e.what() << '\n';
    return kExitInvalid;
  }
  try {
    if (!opts.out.empty()) {
      write_file(opts.out, serialize_solution(res.solution));
      // Read back what was written so a bad file never leaves silently.
      const Solution back = parse_solution(read_file(opts.out), *inst);
      const ValidationReport report = validate(*inst, back);
      if (!report.ok()) {
        err << opts.out << ": " << format_violation(report.violations.front()) << '\n';
        return kExitInvalid;
      }
    }
    if (!opts.trace.empty()) {
      std::ofstream trace(opts.trace);
      if (!trace) throw Error("cannot write '" + opts.trace + "'");
      write_trace_csv(trace, res.optimized.trace);
    }
    if (!opts.portfolio_report.empty()) {
      write_file(opts.portfolio_report, portfolio_report(res.portfolio).dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
  out << summary_line(detail::display_name(*inst, opts.instance), res.sum, res.max, res.lb,
                      format_seconds(res.seconds))
      << '\n';
  return kExitOk;
}

/// Prints one line per violation; exit 0 iff the schedule is valid.
inline int cmd_validate(const std::string& instance_path, const std::string& solution_path, std::ostream& out,
                        std::ostream& err) {
  const auto inst = detail::load_instance(instance_path, err);
  if (!inst) return kExitUsage;
  const auto sol = detail::load_solution(solution_path, *inst, err);
  if (!sol) return kExitUsage;
  const ValidationReport report = validate(*inst, *sol);
  for (const Violation& v : report.violations) out << format_violation(v) << '\n';
  if (!report.ok()) return kExitInvalid;
  out << "OK\n";
  return kExitOk;
}

/// Summary line of an existing schedule, with `-` in the seconds column.
inline int cmd_score(const std::string& instance_path, const std::string& solution_path, std::ostream& out,
                     std::ostream& err) {
  const auto inst = detail::load_instance(instance_path, err);
  if (!inst) return kExitUsage;
  const auto sol = detail::load_solution(solution_path, *inst, err);
  if (!sol) return kExitUsage;
  const ValidationReport report = validate(*inst, *sol);
  if (!report.ok()) {
    for (const Violation& v : report.violations) err << format_violation(v) << '\n';
    return kExitInvalid;
  }
  try {
    out << summary_line(detail::display_name(*inst, instance_path), score_unchecked(*sol, Objective::Sum),
                        score_unchecked(*sol, Objective::Max), lower_bounds(*inst), "-")
        << '\n';
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}

enum class RenderMode { Start, Target, Frame };

inline RenderMode parse_render_mode(std::string_view s) {
  if (s == "start" || s == "start-intermediate") return RenderMode::Start;
  if (s == "target" || s == "target-intermediate") return RenderMode::Target;
  if (s == "frame") return RenderMode::Frame;
  throw Error("unknown render mode '" + std::string(s) + "'");
}

struct RenderOptions {
  std::string instance;
  std::string solution;  // required for frame mode
  RenderMode mode = RenderMode::Start;
  int t = 0;
  InitConfig init;  // produces the intermediate cells of the matching modes
  std::string out;  // stdout when empty
};

inline int cmd_render(const RenderOptions& opts, std::ostream& out, std::ostream& err) {
  const auto inst = detail::load_instance(opts.instance, err);
  if (!inst) return kExitUsage;
  std::string svg;
  if (opts.mode == RenderMode::Frame) {
    if (opts.solution.empty()) {
      err << "frame mode needs a solution file\n";
      return kExitUsage;
    }
    const auto sol = detail::load_solution(opts.solution, *inst, err);
    if (!sol) return kExitUsage;
    try {
      svg = render_frame(*inst, *sol, opts.t);
    } catch (const std::exception& e) {
      err << e.what() << '\n';
      return kExitUsage;
    }
  } else {
    const InitOutcome o = initialize_detailed(*inst, opts.init);
    std::vector<Cell> intermediates = o.intermediates;
    if (intermediates.empty()) {
      if (!o.solution) {
        err << "initialization failed: " << o.error << '\n';
        return kExitInvalid;
      }
      intermediates = inst->starts;  // already solved, nothing is staged
    }
    svg = render_matching(*inst, intermediates, opts.mode == RenderMode::Target);
  }
  if (opts.out.empty()) {
    out << svg;
    return kExitOk;
  }
  try {
    write_file(opts.out, svg);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

inline constexpr const char* kBenchHeader =
    "instance,n,density,config,status,sum,max,lb_sum,lb_max,ratio_sum,ratio_max,seconds";

struct BenchConfig {
  std::vector<int> k_schedule{1, 2, 3, 4, 5, 6, 7};
  int radius = 20;

  [[nodiscard]] std::string label() const {
    std::ostringstream os;
    os << "k=";
    const bool range = std::adjacent_find(k_schedule.begin(), k_schedule.end(),
                                          [](int a, int b) { return b != a + 1; }) == k_schedule.end();
    if (range && k_schedule.size() > 2) {
      os << k_schedule.front() << ".." << k_schedule.back();
    } else {
      for (std::size_t i = 0; i < k_schedule.size(); ++i) os << (i ? "+" : "") << k_schedule[i];
    }
    os << " R=";
    if (radius == kUnlimitedRadius) os << "inf";
    else os << radius;
    return os.str();
  }
};

struct BenchOptions {
  std::string corpus;
  std::vector<BenchConfig> configs{BenchConfig{}};
  SolveOptions solve;  // instance and output paths are ignored
  unsigned workers = 1;
};

/// Instance files of a corpus directory in path order. Files named
/// `*.solution.json` are skipped.
inline std::vector<std::filesystem::path> corpus_files(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("'" + dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const fs::path& p = entry.path();
    if (!entry.is_regular_file() || p.extension() != ".json") continue;
    if (p.stem().extension() == ".solution") continue;
    files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  return files;
}

inline int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
  std::vector<std::filesystem::path> files;
  try {
    files = corpus_files(opts.corpus);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
  struct Loaded {
    std::optional<Instance> inst;
    std::string name;
    std::string error;
  };
  std::vector<Loaded> loaded(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    loaded[i].name = files[i].stem().string();
    try {
      loaded[i].inst = parse_instance(read_file(files[i].string()));
      if (!loaded[i].inst->name.empty()) loaded[i].name = loaded[i].inst->name;
    } catch (const std::exception& e) {
      loaded[i].error = e.what();
    }
  }

  const std::size_t jobs = files.size() * opts.configs.size();
  std::vector<std::string> rows(jobs);
  std::vector<std::string> errors(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const Loaded& l = loaded[j / opts.configs.size()];
      const BenchConfig& config = opts.configs[j % opts.configs.size()];
      std::ostringstream row;
      row << l.name << ',';
      if (!l.inst) {
        row << ",," << config.label() << ",unreadable,,,,,,,";
        errors[j] = l.name + ": " + l.error;
        rows[j] = row.str();
        continue;
      }
      row << l.inst->num_robots() << ',';
      if (l.inst->density) row << *l.inst->density;
      row << ',' << config.label() << ',';
      SolveOptions so = opts.solve;
      so.threads = 1;
      so.optimizer.k_schedule = config.k_schedule;
      so.optimizer.radius = config.radius;
      try {
        const SolveResult res = run_solve(*l.inst, so);
        row << "ok," << res.sum << ',' << res.max << ',' << res.lb.sum << ',' << res.lb.max << ','
            << format_ratio(res.sum, res.lb.sum) << ',' << format_ratio(res.max, res.lb.max) << ','
            << format_seconds(res.seconds);
      } catch (const std::exception& e) {
        row << "failed,,,,,,,";
        errors[j] = l.name + " [" + config.label() + "]: " + e.what();
      }
      rows[j] = row.str();
    }
  };
  const unsigned workers = std::clamp<unsigned>(opts.workers, 1, static_cast<unsigned>(std::max<std::size_t>(jobs, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  out << kBenchHeader << '\n';
  for (std::size_t j = 0; j < jobs; ++j) {
    out << rows[j] << '\n';
    if (!errors[j].empty()) err << errors[j] << '\n';
  }
  return kExitOk;
}

}  // namespace cmplan::cli
