#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "othpo/errors.hpp"
#include "othpo/experiment_config.hpp"
#include "othpo/harness.hpp"
#include "othpo/metrics.hpp"
#include "othpo/results_io.hpp"

namespace othpo::cli {
namespace {

namespace fs = std::filesystem;

struct RunArgs {
  std::string config;
  std::string seeds;
  std::string methods;
  std::optional<int> budget;
  std::string output;
  std::optional<int> parallelism;
  bool force = false;
  bool quiet = false;
};

struct ScoreArgs {
  std::string results;
  std::vector<int> iterations;
  std::string tasks;
  std::string output;
};

struct RankArgs {
  std::string results;
  std::vector<int> iterations;
  std::string output;
};

struct CompareArgs {
  std::string results;
  std::string method_a;
  std::string method_b;
  std::optional<int> iteration;
  std::string output;
};

// Writes to --output when given, otherwise to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw ValidationError("cannot open output '" + path + "'");
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << (v == 0.0 ? 0.0 : v);  // no "-0"
  return s.str();
}

std::vector<int> parse_task_list(const std::string& text, int n_tasks) {
  std::vector<int> tasks;
  if (text.empty()) {
    for (int t = 1; t <= n_tasks; ++t) tasks.push_back(t);
    return tasks;
  }
  for (const auto v : parse_seed_range(text)) {
    if (v < 1 || v > static_cast<std::uint64_t>(n_tasks)) {
      throw ValidationError("task " + std::to_string(v) + " outside 1.." +
                            std::to_string(n_tasks));
    }
    tasks.push_back(static_cast<int>(v));
  }
  return tasks;
}

void check_iterations(const std::vector<int>& iterations, int budget) {
  for (const int m : iterations) {
    if (m < 1 || m > budget) {
      throw ValidationError("iteration " + std::to_string(m) +
                            " outside 1.." + std::to_string(budget));
    }
  }
}

int cmd_run(const RunArgs& args, std::ostream& err) {
  auto plan = load_plan(args.config);
  if (!args.seeds.empty()) plan.seeds = parse_seed_range(args.seeds);
  if (!args.methods.empty()) plan.methods = parse_method_list(args.methods);
  if (args.budget) plan.budget = *args.budget;
  if (args.parallelism) {
    if (*args.parallelism < 1) throw ValidationError("--parallelism must be >= 1");
    plan.parallelism = *args.parallelism;
  }
  plan.validate();

  const fs::path output(args.output);
  const fs::path dir = output.has_parent_path() ? output.parent_path() : fs::path(".");
  if (!fs::is_directory(dir)) {
    throw ValidationError("output directory '" + dir.string() + "' does not exist");
  }
  if (fs::exists(output) && !args.force) {
    throw ValidationError("output '" + output.string() +
                          "' exists; pass --force to overwrite");
  }

  const std::size_t total = plan.methods.size() * plan.seeds.size();
  std::size_t done = 0;
  ProgressCallback progress;
  if (!args.quiet) {
    progress = [&](const std::string& method, std::uint64_t seed, bool ok) {
      ++done;
      err << "[" << done << "/" << total << "] " << method << " seed " << seed
          << (ok ? "" : " ABORTED") << '\n';
    };
  }
  const ResultsTable table = run_experiment(plan, progress);

  {
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + output.string() + "'");
    write_jsonl(out, table);
  }
  std::vector<std::string> method_names;
  for (const auto m : plan.methods) method_names.emplace_back(method_name(m));
  {
    std::ofstream meta(output.string() + ".meta.json", std::ios::trunc);
    meta << results_metadata(table, method_names, plan.seeds).dump(2) << '\n';
  }

  for (const auto& a : table.aborted) {
    err << "aborted: " << a.method << " seed " << a.seed << ": " << a.error << '\n';
  }
  return table.aborted.empty() ? 0 : 2;
}

int cmd_score(const ScoreArgs& args, std::ostream& out, std::ostream& err) {
  const auto traces = TraceSet::from_table(read_jsonl_file(args.results));
  std::vector<int> iterations = args.iterations;
  if (iterations.empty()) {
    for (const int m : {1, 10, 25}) {
      iterations.push_back(std::min(m, traces.budget()));
    }
    std::sort(iterations.begin(), iterations.end());
    iterations.erase(std::unique(iterations.begin(), iterations.end()),
                     iterations.end());
  }
  check_iterations(iterations, traces.budget());
  const auto tasks = parse_task_list(args.tasks, traces.n_tasks());

  Sink sink(args.output, out);
  auto& csv = sink.get();
  csv << "method,task,iteration,mean,two_se\n";
  int undefined = 0;
  for (const auto& method : traces.methods()) {
    for (const int task : tasks) {
      for (const int m : iterations) {
        csv << method << ',' << task << ',' << m << ',';
        try {
          const auto s = normalized_score_summary(traces, method, task, m);
          csv << format_number(s.mean) << ',' << format_number(s.two_se) << '\n';
        } catch (const UndefinedMetricError&) {
          // Empty cells: RandomSearch ties the best reference on this task.
          csv << ",\n";
          ++undefined;
        }
      }
    }
  }
  if (undefined > 0) {
    err << "warning: " << undefined
        << " score(s) undefined (zero denominator), left empty\n";
  }
  return 0;
}

int cmd_rank(const RankArgs& args, std::ostream& out) {
  const auto traces = TraceSet::from_table(read_jsonl_file(args.results));
  if (traces.methods().size() < 2) {
    throw ValidationError("ranking needs at least two methods in the results");
  }
  std::vector<int> iterations = args.iterations;
  if (iterations.empty()) {
    for (int m = 1; m <= traces.budget(); ++m) iterations.push_back(m);
  }
  check_iterations(iterations, traces.budget());

  Sink sink(args.output, out);
  auto& csv = sink.get();
  csv << "method,iteration,mean_rank,two_se\n";
  for (const int m : iterations) {
    for (const auto& r : mean_rankings(traces, traces.methods(), m)) {
      csv << r.method << ',' << m << ',' << format_number(r.mean_rank) << ','
          << format_number(r.two_se) << '\n';
    }
  }
  return 0;
}

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  const auto traces = TraceSet::from_table(read_jsonl_file(args.results));
  const int iteration = args.iteration.value_or(traces.budget());
  check_iterations({iteration}, traces.budget());
  const auto cmp =
      downstream_comparison(traces, args.method_a, args.method_b, iteration);

  const auto cell = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
  };
  Sink sink(args.output, out);
  auto& csv = sink.get();
  csv << "task,se_reduction_pct,mean_improvement_pct\n";
  for (const auto& t : cmp.tasks) {
    csv << t.task << ',' << cell(t.se_reduction_pct) << ','
        << cell(t.mean_improvement_pct) << '\n';
  }
  csv << "mean," << format_number(cmp.se_reduction.mean) << ','
      << format_number(cmp.mean_improvement.mean) << '\n';
  csv << "two_se," << format_number(cmp.se_reduction.two_se) << ','
      << format_number(cmp.mean_improvement.two_se) << '\n';
  if (cmp.excluded_se > 0 || cmp.excluded_mean > 0) {
    err << "warning: excluded " << cmp.excluded_se
        << " task(s) with zero baseline SE and " << cmp.excluded_mean
        << " task(s) with zero baseline mean\n";
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ordered transfer hyperparameter optimization experiments"};
  app.name("othpo");
  app.require_subcommand(1, 1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config, writing JSONL");
  run_cmd->add_option("config", run_args.config, "Experiment config (JSON)")
      ->required();
  run_cmd->add_option("--seeds", run_args.seeds, "Seeds, e.g. 0..49 or 0,3,7");
  run_cmd->add_option("--methods", run_args.methods, "Comma-separated method names");
  run_cmd->add_option("--budget", run_args.budget, "Evaluations per task");
  run_cmd->add_option("--output,-o", run_args.output, "JSONL output path")
      ->required();
  run_cmd->add_option("--parallelism,-j", run_args.parallelism,
                      "Concurrent (method, seed) runs");
  run_cmd->add_flag("--force", run_args.force, "Overwrite an existing output");
  run_cmd->add_flag("--quiet,-q", run_args.quiet, "No progress on stderr");

  ScoreArgs score_args;
  auto* score_cmd = app.add_subcommand("score", "Normalized scores per task (CSV)");
  score_cmd->add_option("results", score_args.results, "JSONL results")->required();
  score_cmd->add_option("--iteration", score_args.iterations,
                        "Iterations (default 1,10,25 clipped to the budget)")
      ->delimiter(',');
  score_cmd->add_option("--tasks", score_args.tasks, "Tasks, e.g. 3..20");
  score_cmd->add_option("--output,-o", score_args.output, "CSV output path");

  RankArgs rank_args;
  auto* rank_cmd = app.add_subcommand("rank", "Mean rankings over tasks (CSV)");
  rank_cmd->add_option("results", rank_args.results, "JSONL results")->required();
  rank_cmd->add_option("--iteration", rank_args.iterations,
                       "Iterations (default every iteration)")
      ->delimiter(',');
  rank_cmd->add_option("--output,-o", rank_args.output, "CSV output path");

  CompareArgs cmp_args;
  auto* cmp_cmd = app.add_subcommand(
      "compare", "Standard-error reduction and mean improvement of A over B");
  cmp_cmd->add_option("results", cmp_args.results, "JSONL results")->required();
  cmp_cmd->add_option("method_a", cmp_args.method_a)->required();
  cmp_cmd->add_option("method_b", cmp_args.method_b)->required();
  cmp_cmd->add_option("--iteration", cmp_args.iteration,
                      "Iteration (default: the budget)");
  cmp_cmd->add_option("--output,-o", cmp_args.output, "CSV output path");

  auto* example_cmd = app.add_subcommand(
      "export-example-config", "Print a documented example config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; every usage error maps to 1.
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) return cmd_run(run_args, err);
    if (*score_cmd) return cmd_score(score_args, out, err);
    if (*rank_cmd) return cmd_rank(rank_args, out);
    if (*cmp_cmd) return cmd_compare(cmp_args, out, err);
    if (*example_cmd) {
      out << example_config().dump(2) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace othpo::cli
