#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "othpo/rng.hpp"
#include "othpo/schedulers.hpp"
#include "othpo/space.hpp"

namespace othpo {

enum class Direction { kMinimize, kMaximize };

std::string_view direction_name(Direction d);
Direction parse_direction(std::string_view name);

struct TaskContext {
  int index = 1;         // 1-based
  double feature = 1.0;  // training-set size, or the task index
};

// An ordered sequence of tasks over one fixed search space. Evaluations are
// pure functions of (task, config, noise seed).
class Benchmark {
 public:
  virtual ~Benchmark() = default;

  virtual std::string name() const = 0;
  virtual const SearchSpace& space() const = 0;
  virtual std::span<const TaskContext> tasks() const = 0;
  virtual Direction direction() const = 0;
  virtual ContextKind context_kind() const = 0;
  // Native objective of `config` on task `task_index` (1-based).
  virtual double evaluate(int task_index, const Configuration& config,
                          std::uint64_t noise_seed) const = 0;

  int n_tasks() const { return static_cast<int>(tasks().size()); }
  ContextScale context_scale() const;
};

// --- NewsVendor ------------------------------------------------------------

struct NewsVendorState {
  std::vector<double> utilities;
  double price_sensitivity = 1.0;
  int customers_per_period = 200;
  std::vector<double> unit_costs;
  double rw_sigma = 1.5;
  double max_price = 20.0;
};

struct NewsVendorParams {
  std::vector<double> initial_utilities{10.0, 12.0, 8.0};
  double price_sensitivity = 1.0;
  std::vector<double> unit_costs{2.0, 3.0, 1.0};
  int customers_per_period = 200;
  double rw_sigma = 1.5;
  double max_price = 20.0;
};

// One period: every customer picks the option maximizing
// utility_c - sensitivity * price_c + Gumbel noise, or the no-purchase
// option (utility 0 + Gumbel noise). Returns the summed margin.
double newsvendor_profit(const NewsVendorState& state,
                         const Configuration& prices, Rng& noise_rng);

// Multinomial-logit expectation of newsvendor_profit.
double newsvendor_expected_profit(const NewsVendorState& state,
                                  const Configuration& prices);

class NewsVendorBenchmark final : public Benchmark {
 public:
  NewsVendorBenchmark(std::uint64_t seed, int n_tasks,
                      const NewsVendorParams& params = {});

  std::string name() const override { return "newsvendor"; }
  const SearchSpace& space() const override { return space_; }
  std::span<const TaskContext> tasks() const override { return tasks_; }
  Direction direction() const override { return Direction::kMaximize; }
  ContextKind context_kind() const override { return ContextKind::kIndex; }
  double evaluate(int task_index, const Configuration& config,
                  std::uint64_t noise_seed) const override;

  const NewsVendorState& state(int task_index) const;

 private:
  SearchSpace space_;
  std::vector<TaskContext> tasks_;
  std::vector<NewsVendorState> states_;
};

std::unique_ptr<Benchmark> newsvendor_sequence(std::uint64_t seed,
                                               int n_tasks = 9,
                                               const NewsVendorParams& params = {});

// --- synthetic drifting optimum ---------------------------------------------

// Training-set sizes 56 .. 56000 on a log grid (28 values).
std::span<const double> default_dataset_sizes();

// f(x; s) = sum_j w_j (x_j - mu_j(s))^2 + eps, where mu moves linearly in
// log s from mu_start to mu_end and eps ~ N(0, (0.01 (1 + s_min / s))^2).
class SyntheticDriftBenchmark final : public Benchmark {
 public:
  SyntheticDriftBenchmark(std::uint64_t seed, int dim,
                          std::vector<double> sizes);

  std::string name() const override { return "synthetic_drift"; }
  const SearchSpace& space() const override { return space_; }
  std::span<const TaskContext> tasks() const override { return tasks_; }
  Direction direction() const override { return Direction::kMinimize; }
  ContextKind context_kind() const override { return ContextKind::kSize; }
  double evaluate(int task_index, const Configuration& config,
                  std::uint64_t noise_seed) const override;

  Eigen::VectorXd optimum(int task_index) const;
  double noise_free(int task_index, const Configuration& config) const;
  double noise_stddev(int task_index) const;
  const Eigen::VectorXd& mu_start() const { return mu_start_; }
  const Eigen::VectorXd& mu_end() const { return mu_end_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  SearchSpace space_;
  std::vector<TaskContext> tasks_;
  Eigen::VectorXd mu_start_;
  Eigen::VectorXd mu_end_;
  Eigen::VectorXd weights_;
};

// n_tasks = sizes.size(); an empty `sizes` takes the first n_tasks default
// sizes.
std::unique_ptr<Benchmark> synthetic_drift(std::uint64_t seed, int n_tasks,
                                           int dim,
                                           std::vector<double> sizes = {});

// --- tabular replay ---------------------------------------------------------

// CSV with a header row: one column per search-space dimension, a `context`
// column and an `objective` column. Each distinct context is one task, in
// ascending order. A query returns the objective of the nearest stored row
// (encoded-space Euclidean distance) within the task's context.
class TabularBenchmark final : public Benchmark {
 public:
  static std::unique_ptr<TabularBenchmark> load(
      const std::filesystem::path& path, SearchSpace space,
      Direction direction, ContextKind kind = ContextKind::kSize);
  static std::unique_ptr<TabularBenchmark> parse(
      std::istream& in, SearchSpace space, Direction direction,
      ContextKind kind = ContextKind::kSize, std::string name = "tabular");

  std::string name() const override { return name_; }
  const SearchSpace& space() const override { return space_; }
  std::span<const TaskContext> tasks() const override { return tasks_; }
  Direction direction() const override { return direction_; }
  ContextKind context_kind() const override { return kind_; }
  double evaluate(int task_index, const Configuration& config,
                  std::uint64_t noise_seed) const override;

  // Evaluation by raw context value; throws ValidationError if unknown.
  double evaluate_context(double context, const Configuration& config) const;

 private:
  struct Table {
    double context = 0.0;
    PointMatrix encoded;
    Eigen::VectorXd objectives;
  };

  TabularBenchmark() = default;

  std::string name_;
  SearchSpace space_;
  Direction direction_ = Direction::kMinimize;
  ContextKind kind_ = ContextKind::kSize;
  std::vector<TaskContext> tasks_;
  std::vector<Table> tables_;
};

}  // namespace othpo
