#include "othpo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "othpo/errors.hpp"

namespace othpo {

double sample_mean(std::span<const double> values) {
  if (values.empty()) throw UndefinedMetricError("mean of no values");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double standard_error(std::span<const double> values) {
  if (values.size() < 2) {
    throw UndefinedMetricError("standard error needs at least two values");
  }
  const double mean = sample_mean(values);
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(values.size());
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

MeanSe aggregate(std::span<const double> values) {
  return {sample_mean(values), 2.0 * standard_error(values)};
}

double normalized_score(double loss, double random_search_loss,
                        double best_loss) {
  const double denom = random_search_loss - best_loss;
  if (denom == 0.0) {
    if (loss == best_loss) return 0.0;
    throw UndefinedMetricError(
        "normalized score undefined: RandomSearch equals the best reference");
  }
  // Ratio first: the RandomSearch loss then scores exactly 100.
  return 100.0 * ((loss - best_loss) / denom);
}

// --- TraceSet ---------------------------------------------------------------

TraceSet TraceSet::from_table(const ResultsTable& table) {
  TraceSet ts;
  ts.direction_ = table.direction;
  const bool maximize = table.direction == Direction::kMaximize;

  int budget = table.budget;
  int n_tasks = 0;
  for (const auto& r : table.records) {
    budget = std::max(budget, r.iteration);
    n_tasks = std::max(n_tasks, r.task);
  }
  ts.budget_ = budget;
  ts.n_tasks_ = n_tasks;

  std::map<std::string, std::set<std::uint64_t>> seen;
  for (const auto& r : table.records) {
    if (std::find(ts.methods_.begin(), ts.methods_.end(), r.method) ==
        ts.methods_.end()) {
      ts.methods_.push_back(r.method);
    }
    seen[r.method].insert(r.seed);
  }
  for (const auto& [method, seeds] : seen) {
    ts.seeds_[method].assign(seeds.begin(), seeds.end());
    ts.traces_[method].assign(
        seeds.size(),
        std::vector<std::vector<double>>(
            static_cast<std::size_t>(n_tasks),
            std::vector<double>(static_cast<std::size_t>(budget),
                                std::numeric_limits<double>::quiet_NaN())));
  }
  for (const auto& r : table.records) {
    if (r.task < 1 || r.iteration < 1) {
      throw ValidationError("record with non-positive task or iteration");
    }
    const auto& seeds = ts.seeds_[r.method];
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(seeds.begin(), seeds.end(), r.seed) - seeds.begin());
    double& slot = ts.traces_[r.method][pos][static_cast<std::size_t>(r.task - 1)]
                             [static_cast<std::size_t>(r.iteration - 1)];
    if (!std::isnan(slot)) {
      throw ValidationError("duplicate record for " + r.method + " seed " +
                            std::to_string(r.seed) + " task " +
                            std::to_string(r.task) + " iteration " +
                            std::to_string(r.iteration));
    }
    slot = maximize ? -r.cum_best : r.cum_best;
  }
  for (const auto& [method, per_seed] : ts.traces_) {
    for (std::size_t s = 0; s < per_seed.size(); ++s) {
      for (std::size_t t = 0; t < per_seed[s].size(); ++t) {
        for (const double v : per_seed[s][t]) {
          if (std::isnan(v)) {
            throw ValidationError(
                "incomplete trace for " + method + " seed " +
                std::to_string(ts.seeds_[method][s]) + " task " +
                std::to_string(t + 1) + ": expected " +
                std::to_string(budget) + " iterations");
          }
        }
      }
    }
  }
  return ts;
}

bool TraceSet::has_method(const std::string& method) const {
  return traces_.count(method) > 0;
}

std::vector<std::uint64_t> TraceSet::seeds(const std::string& method) const {
  const auto it = seeds_.find(method);
  if (it == seeds_.end()) throw ValidationError("unknown method '" + method + "'");
  return it->second;
}

const std::vector<double>& TraceSet::trace(const std::string& method,
                                           std::size_t seed_pos,
                                           int task) const {
  return traces_.at(method)[seed_pos][static_cast<std::size_t>(task - 1)];
}

std::vector<double> TraceSet::losses(const std::string& method, int task,
                                     int iteration) const {
  const auto it = traces_.find(method);
  if (it == traces_.end()) throw ValidationError("unknown method '" + method + "'");
  if (task < 1 || task > n_tasks_) {
    throw ValidationError("task " + std::to_string(task) + " out of range");
  }
  if (iteration < 1 || iteration > budget_) {
    throw ValidationError("iteration " + std::to_string(iteration) +
                          " beyond budget " + std::to_string(budget_));
  }
  std::vector<double> out;
  out.reserve(it->second.size());
  for (std::size_t s = 0; s < it->second.size(); ++s) {
    out.push_back(trace(method, s, task)[static_cast<std::size_t>(iteration - 1)]);
  }
  return out;
}

std::vector<double> TraceSet::native(const std::string& method, int task,
                                     int iteration) const {
  auto out = losses(method, task, iteration);
  if (direction_ == Direction::kMaximize) {
    for (auto& v : out) v = -v;
  }
  return out;
}

double TraceSet::mean_loss(const std::string& method, int task,
                           int iteration) const {
  return sample_mean(losses(method, task, iteration));
}

// --- normalized score -------------------------------------------------------

ScoreReference score_reference(const TraceSet& traces, int task,
                               std::span<const std::string> compared) {
  static const std::string kRandomSearch = "RandomSearch";
  if (!traces.has_method(kRandomSearch)) {
    throw ValidationError("normalized score requires RandomSearch results");
  }
  std::vector<std::string> set(compared.begin(), compared.end());
  if (set.empty()) set = traces.methods();
  if (std::find(set.begin(), set.end(), kRandomSearch) == set.end()) {
    set.push_back(kRandomSearch);
  }
  const int m = traces.budget();
  ScoreReference ref;
  ref.random_search_loss = traces.mean_loss(kRandomSearch, task, m);
  ref.best_loss = std::numeric_limits<double>::infinity();
  for (const auto& method : set) {
    const double l = traces.mean_loss(method, task, m);
    if (l < ref.best_loss) {
      ref.best_loss = l;
      ref.best_method = method;
    }
  }
  return ref;
}

double normalized_score(const TraceSet& traces, const std::string& method,
                        int task, int iteration,
                        std::span<const std::string> compared) {
  const ScoreReference ref = score_reference(traces, task, compared);
  return normalized_score(traces.mean_loss(method, task, iteration),
                          ref.random_search_loss, ref.best_loss);
}

std::vector<double> per_seed_scores(const TraceSet& traces,
                                    const std::string& method, int task,
                                    int iteration,
                                    std::span<const std::string> compared) {
  const ScoreReference ref = score_reference(traces, task, compared);
  std::vector<double> out;
  for (const double l : traces.losses(method, task, iteration)) {
    out.push_back(normalized_score(l, ref.random_search_loss, ref.best_loss));
  }
  return out;
}

MeanSe normalized_score_summary(const TraceSet& traces,
                                const std::string& method, int task,
                                int iteration,
                                std::span<const std::string> compared) {
  MeanSe out;
  out.mean = normalized_score(traces, method, task, iteration, compared);
  const ScoreReference ref = score_reference(traces, task, compared);
  const double denom = ref.random_search_loss - ref.best_loss;
  const auto losses = traces.losses(method, task, iteration);
  if (losses.size() >= 2) {
    // The score is affine in the loss, so its SE is the loss SE rescaled.
    out.two_se = denom == 0.0
                     ? 0.0
                     : 2.0 * standard_error(losses) * 100.0 / std::abs(denom);
  }
  return out;
}

// --- rankings -----------------------------------------------------------------

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start;
    while (end + 1 < n && values[order[end + 1]] == values[order[start]]) ++end;
    const double rank = 0.5 * static_cast<double>(start + end) + 1.0;
    for (std::size_t k = start; k <= end; ++k) ranks[order[k]] = rank;
    start = end + 1;
  }
  return ranks;
}

std::vector<RankSummary> mean_rankings(const TraceSet& traces,
                                       std::span<const std::string> methods,
                                       int iteration) {
  if (methods.size() < 2) throw ValidationError("ranking needs >= 2 methods");
  std::vector<std::vector<double>> per_method(methods.size());
  for (int task = 1; task <= traces.n_tasks(); ++task) {
    std::vector<double> means;
    for (const auto& m : methods) means.push_back(traces.mean_loss(m, task, iteration));
    const auto ranks = average_ranks(means);
    for (std::size_t k = 0; k < methods.size(); ++k) per_method[k].push_back(ranks[k]);
  }
  std::vector<RankSummary> out;
  for (std::size_t k = 0; k < methods.size(); ++k) {
    RankSummary r;
    r.method = methods[k];
    r.mean_rank = sample_mean(per_method[k]);
    r.two_se = per_method[k].size() >= 2 ? 2.0 * standard_error(per_method[k]) : 0.0;
    out.push_back(r);
  }
  return out;
}

// --- downstream -------------------------------------------------------------

DownstreamComparison downstream_comparison(const TraceSet& traces,
                                           const std::string& method_a,
                                           const std::string& method_b,
                                           int iteration) {
  if (!traces.has_method(method_a) || !traces.has_method(method_b)) {
    throw ValidationError("downstream comparison: both methods must be present");
  }
  const double sign = traces.direction() == Direction::kMaximize ? 1.0 : -1.0;
  DownstreamComparison out;
  std::vector<double> se_values;
  std::vector<double> mean_values;
  for (int task = 1; task <= traces.n_tasks(); ++task) {
    const auto a = traces.native(method_a, task, iteration);
    const auto b = traces.native(method_b, task, iteration);
    DownstreamTask row;
    row.task = task;
    const double s_a = standard_error(a);
    const double s_b = standard_error(b);
    if (s_b != 0.0) {
      row.se_reduction_pct = 100.0 * (1.0 - s_a / s_b);
      se_values.push_back(*row.se_reduction_pct);
    } else {
      ++out.excluded_se;
    }
    const double m_a = sample_mean(a);
    const double m_b = sample_mean(b);
    if (m_b != 0.0) {
      row.mean_improvement_pct = sign * 100.0 * (1.0 - m_a / m_b);
      mean_values.push_back(*row.mean_improvement_pct);
    } else {
      ++out.excluded_mean;
    }
    out.tasks.push_back(row);
  }
  const auto summarize = [](const std::vector<double>& v) {
    if (v.empty()) return MeanSe{std::numeric_limits<double>::quiet_NaN(),
                                 std::numeric_limits<double>::quiet_NaN()};
    if (v.size() == 1) return MeanSe{v[0], 0.0};
    return aggregate(v);
  };
  out.se_reduction = summarize(se_values);
  out.mean_improvement = summarize(mean_values);
  return out;
}

}  // namespace othpo
