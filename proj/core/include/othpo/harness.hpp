#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "othpo/benchmarks.hpp"
#include "othpo/schedulers.hpp"

namespace othpo {

struct ExperimentPlan {
  std::shared_ptr<const Benchmark> benchmark;
  std::vector<Method> methods;
  int budget = 25;
  std::vector<std::uint64_t> seeds;  // default 0..49
  SchedulerConfig scheduler;         // `method` is set per run
  int parallelism = 1;

  // Throws ValidationError on an empty benchmark/method list, budget < 1 or
  // duplicate seeds.
  void validate() const;
};

std::vector<std::uint64_t> default_seeds();

// One evaluation. Objectives are native (un-negated); cum_best is the best
// native objective so far within the task.
struct Record {
  std::string benchmark;
  std::string method;
  std::uint64_t seed = 0;
  int task = 1;
  int iteration = 1;
  double context_feature = 0.0;
  Configuration config;
  double objective = 0.0;
  double cum_best = 0.0;
};

struct AbortedRun {
  std::string method;
  std::uint64_t seed = 0;
  std::string error;
};

struct ResultsTable {
  std::string benchmark;
  Direction direction = Direction::kMinimize;
  std::vector<std::string> dimension_names;
  int budget = 0;
  std::vector<Record> records;
  std::vector<AbortedRun> aborted;
};

// Runs every task of the benchmark in order for one (method, seed), carrying
// the history forward. Scheduler streams derive from (seed, task) and noise
// streams from (seed, task, iteration). Throws on scheduler/benchmark errors.
std::vector<Record> run_method_seed(const ExperimentPlan& plan, Method method,
                                    std::uint64_t seed);

// All (method, seed) runs, up to plan.parallelism at a time. Records come out
// ordered by (method order, seed order, task, iteration) regardless of
// execution order. Failed runs land in `aborted` and contribute no records.
using ProgressCallback = std::function<void(const std::string& method,
                                            std::uint64_t seed, bool ok)>;
ResultsTable run_experiment(const ExperimentPlan& plan,
                            const ProgressCallback& progress = {});

}  // namespace othpo
