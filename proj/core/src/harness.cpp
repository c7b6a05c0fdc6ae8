#include "othpo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <set>
#include <thread>

#include "othpo/errors.hpp"

namespace othpo {

void ExperimentPlan::validate() const {
  if (!benchmark) throw ValidationError("plan has no benchmark");
  if (methods.empty()) throw ValidationError("plan has no methods");
  if (budget < 1) throw ValidationError("budget must be >= 1");
  if (seeds.empty()) throw ValidationError("plan has no seeds");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ValidationError("seeds must be distinct");
  }
  if (benchmark->n_tasks() < 1) throw ValidationError("benchmark has no tasks");
}

std::vector<std::uint64_t> default_seeds() {
  std::vector<std::uint64_t> seeds(50);
  for (std::uint64_t s = 0; s < seeds.size(); ++s) seeds[s] = s;
  return seeds;
}

std::vector<Record> run_method_seed(const ExperimentPlan& plan, Method method,
                                    std::uint64_t seed) {
  const Benchmark& bench = *plan.benchmark;
  const bool maximize = bench.direction() == Direction::kMaximize;
  SchedulerConfig config = plan.scheduler;
  config.method = method;
  Scheduler scheduler(bench.space(), config);
  const ContextScale scale = bench.context_scale();

  TaskHistory history;
  std::vector<Record> records;
  records.reserve(static_cast<std::size_t>(bench.n_tasks() * plan.budget));
  for (const TaskContext& ctx : bench.tasks()) {
    const auto task = static_cast<std::uint64_t>(ctx.index);
    Rng rng(derive_seed(seed, task, 0, Stream::kScheduler));
    scheduler.begin_task(history, TaskInfo{ctx.index, ctx.feature, scale, plan.budget},
                         rng);

    TaskEvaluations current;
    double cum_best = 0.0;
    for (int m = 1; m <= plan.budget; ++m) {
      Configuration config_m = scheduler.suggest(current, rng);
      bench.space().validate(config_m);
      const double y = bench.evaluate(
          ctx.index, config_m,
          derive_seed(seed, task, static_cast<std::uint64_t>(m), Stream::kNoise));
      if (!std::isfinite(y)) {
        throw NumericError("benchmark returned a non-finite objective");
      }
      cum_best = m == 1 ? y : (maximize ? std::max(cum_best, y)
                                        : std::min(cum_best, y));
      records.push_back(Record{bench.name(), std::string(method_name(method)),
                               seed, ctx.index, m, ctx.feature, config_m, y,
                               cum_best});
      current.push_back(Evaluation{std::move(config_m), maximize ? -y : y,
                                   ctx.index, m, ctx.feature});
    }
    history.tasks.push_back(std::move(current));
    history.context_features.push_back(ctx.feature);
  }
  return records;
}

ResultsTable run_experiment(const ExperimentPlan& plan,
                            const ProgressCallback& progress) {
  plan.validate();
  struct Job {
    Method method;
    std::uint64_t seed;
    std::vector<Record> records;
    std::string error;
    bool ok = false;
  };
  std::vector<Job> jobs;
  for (const auto m : plan.methods) {
    for (const auto s : plan.seeds) jobs.push_back(Job{m, s, {}, {}, false});
  }

  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      Job& job = jobs[i];
      try {
        job.records = run_method_seed(plan, job.method, job.seed);
        job.ok = true;
      } catch (const std::exception& e) {
        job.error = e.what();
      }
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(std::string(method_name(job.method)), job.seed, job.ok);
      }
    }
  };
  const int threads = std::clamp(plan.parallelism, 1,
                                 static_cast<int>(std::max<std::size_t>(1, jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ResultsTable table;
  table.benchmark = plan.benchmark->name();
  table.direction = plan.benchmark->direction();
  table.budget = plan.budget;
  for (const auto& d : plan.benchmark->space().dimensions()) {
    table.dimension_names.push_back(d.name);
  }
  for (auto& job : jobs) {
    if (job.ok) {
      std::move(job.records.begin(), job.records.end(),
                std::back_inserter(table.records));
    } else {
      table.aborted.push_back(
          {std::string(method_name(job.method)), job.seed, job.error});
    }
  }
  return table;
}

}  // namespace othpo
