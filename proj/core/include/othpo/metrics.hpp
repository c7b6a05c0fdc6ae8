#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "othpo/benchmarks.hpp"
#include "othpo/harness.hpp"

namespace othpo {

struct MeanSe {
  double mean = 0.0;
  double two_se = 0.0;  // 2 * sample stddev / sqrt(n)
};

// Throws UndefinedMetricError for fewer than two values.
MeanSe aggregate(std::span<const double> values);
double sample_mean(std::span<const double> values);
// Sample standard error; throws UndefinedMetricError for n < 2.
double standard_error(std::span<const double> values);

// 100 (L - L_best) / (L_rs - L_best). A zero denominator yields 0 when
// L == L_best and throws UndefinedMetricError otherwise.
double normalized_score(double loss, double random_search_loss, double best_loss);

// Cumulative-best traces indexed by (method, task, seed, iteration). Losses
// follow the minimization convention (maximization objectives negated).
class TraceSet {
 public:
  // Throws ValidationError unless every (method, seed, task) holds exactly
  // `budget` iterations 1..budget.
  static TraceSet from_table(const ResultsTable& table);

  const std::vector<std::string>& methods() const { return methods_; }
  bool has_method(const std::string& method) const;
  int n_tasks() const { return n_tasks_; }
  int budget() const { return budget_; }
  Direction direction() const { return direction_; }
  std::vector<std::uint64_t> seeds(const std::string& method) const;

  // Per-seed cumulative-best losses, ordered by seed.
  std::vector<double> losses(const std::string& method, int task,
                             int iteration) const;
  // Per-seed cumulative best in native units.
  std::vector<double> native(const std::string& method, int task,
                             int iteration) const;
  double mean_loss(const std::string& method, int task, int iteration) const;

 private:
  const std::vector<double>& trace(const std::string& method,
                                   std::size_t seed_pos, int task) const;

  std::vector<std::string> methods_;
  Direction direction_ = Direction::kMinimize;
  int n_tasks_ = 0;
  int budget_ = 0;
  // method -> seeds (sorted) and traces[seed_pos][task-1][iteration-1]
  std::map<std::string, std::vector<std::uint64_t>> seeds_;
  std::map<std::string, std::vector<std::vector<std::vector<double>>>> traces_;
};

struct ScoreReference {
  double random_search_loss = 0.0;  // L^RS_{i,M}
  double best_loss = 0.0;           // L^best_{i,M}
  std::string best_method;
};

// L_best is the best mean loss at the final iteration across `compared`
// (all methods in the set if empty). Requires RandomSearch in the set.
ScoreReference score_reference(const TraceSet& traces, int task,
                               std::span<const std::string> compared = {});

// Normalized score of the method's mean cumulative best at `iteration`.
double normalized_score(const TraceSet& traces, const std::string& method,
                        int task, int iteration,
                        std::span<const std::string> compared = {});

// Mean is the score of the mean loss; two_se comes from per-seed scores
// against the same reference (0 when fewer than two seeds).
MeanSe normalized_score_summary(const TraceSet& traces,
                                const std::string& method, int task,
                                int iteration,
                                std::span<const std::string> compared = {});

// Per-seed normalized scores (same seed order as TraceSet::seeds).
std::vector<double> per_seed_scores(const TraceSet& traces,
                                    const std::string& method, int task,
                                    int iteration,
                                    std::span<const std::string> compared = {});

// Average ranks (1 = best, ties averaged) of `values`, lower is better.
std::vector<double> average_ranks(std::span<const double> values);

struct RankSummary {
  std::string method;
  double mean_rank = 0.0;
  double two_se = 0.0;
};

// Per task, methods are ranked by mean cumulative best at `iteration`; the
// result averages ranks over tasks.
std::vector<RankSummary> mean_rankings(const TraceSet& traces,
                                       std::span<const std::string> methods,
                                       int iteration);

struct DownstreamTask {
  int task = 1;
  std::optional<double> se_reduction_pct;
  std::optional<double> mean_improvement_pct;
};

struct DownstreamComparison {
  std::vector<DownstreamTask> tasks;
  MeanSe se_reduction;
  MeanSe mean_improvement;
  int excluded_se = 0;    // tasks with s_b == 0
  int excluded_mean = 0;  // tasks with m_b == 0
};

// se_reduction = 100 (1 - s_a / s_b); mean_improvement = 100 (1 - m_a / m_b)
// for maximization and its negation for minimization, using native
// cumulative-best values. Aggregated across tasks only.
DownstreamComparison downstream_comparison(const TraceSet& traces,
                                           const std::string& method_a,
                                           const std::string& method_b,
                                           int iteration);

}  // namespace othpo
