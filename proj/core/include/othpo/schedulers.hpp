#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "othpo/acquisition.hpp"
#include "othpo/gaussian_process.hpp"
#include "othpo/rng.hpp"
#include "othpo/space.hpp"

namespace othpo {

enum class Method {
  kRandomSearch,
  kBO,
  kBoundingBox,
  kZeroShot,
  kCTS,
  kTransferBO,
  kSimpleOrdered,
  kSimpleOrderedShuffled,
  kSimplePrevious,
  kSimplePreviousNoBO,
};

std::string_view method_name(Method method);
// Throws ValidationError listing the valid names.
Method parse_method(std::string_view name);
std::span<const Method> all_methods();
// True for methods that consume evaluations from previous tasks.
bool uses_transfer(Method method);

// One evaluation y = f(config; task). `objective` is a loss: maximization
// benchmarks are negated before they reach a scheduler.
struct Evaluation {
  Configuration config;
  double objective = 0.0;
  int task_index = 1;  // 1-based
  int iteration = 1;   // 1-based
  double context_feature = 0.0;
};

using TaskEvaluations = std::vector<Evaluation>;

// Completed tasks in benchmark order, oldest first.
struct TaskHistory {
  std::vector<TaskEvaluations> tasks;
  std::vector<double> context_features;
};

enum class ContextKind { kSize, kIndex };

// Maps a task's context feature to [0,1] for the TransferBO task input.
struct ContextScale {
  ContextKind kind = ContextKind::kIndex;
  double min_feature = 1.0;
  double max_feature = 1.0;
  int n_tasks = 1;

  double normalize(double feature) const;
};

struct TaskInfo {
  int task_index = 1;
  double context_feature = 1.0;
  ContextScale scale;
  int budget = 25;  // evaluations on this task
};

struct SchedulerConfig {
  Method method = Method::kBO;
  int n_warm_start = 5;
  int initial_design = 3;
  AcquisitionSettings acquisition;
  GPFitOptions gp;
  int cts_candidate_pool = 100;
  int transfer_obs_cap = 200;
};

// --- building blocks -------------------------------------------------------

// Best configuration of a task (lowest objective, first occurrence on ties).
const Configuration& task_optimum(const TaskEvaluations& task);

// Distinct configurations of a task ordered by ascending objective; each
// configuration keeps its first occurrence.
std::vector<Evaluation> ranked_distinct(const TaskEvaluations& task);

// Warm-start list: tops of the previous tasks, most recent first, skipping
// repeats; joint optima after the first go to the back of the top-level
// pass; then second-best of each task, third-best, and so on. Stops at
// `count` entries or when the history is exhausted.
std::vector<Configuration> simple_ordered_warm_start(const TaskHistory& history,
                                                     int count);

// The last task's best `count` distinct configurations (count < 0: all).
std::vector<Configuration> simple_previous_warm_start(
    const TaskHistory& history, int count);

struct BoundingBox {
  UnitBox box;         // encoded-space bounds
  SearchSpace space;   // native restricted space
};

// Non-expanding hull of previous per-task optima, or nullopt while fewer than
// two distinct optima exist.
std::optional<BoundingBox> bounding_box_for_task(const SearchSpace& space,
                                                 const TaskHistory& history);

// Greedy portfolio over a candidates x tasks matrix of normalized losses.
// Each step adds the candidate that minimizes sum_t min_{p in P} L(p, t);
// ties go to the lower summed loss, then the lower index.
std::vector<Eigen::Index> greedy_portfolio(const Eigen::MatrixXd& losses,
                                           int budget);
double portfolio_objective(const Eigen::MatrixXd& losses,
                           std::span<const Eigen::Index> members);

struct PortfolioProblem {
  std::vector<Configuration> candidates;
  Eigen::MatrixXd normalized_losses;  // candidates x tasks, each column in [0,1]
};
PortfolioProblem zeroshot_loss_matrix(const SearchSpace& space,
                                      const TaskHistory& history);
std::vector<Configuration> build_zeroshot_portfolio(const SearchSpace& space,
                                                    const TaskHistory& history,
                                                    int budget);

// Mid-rank quantiles (rank - 0.5) / n with averaged ranks on ties; the
// lowest loss gets the smallest quantile.
std::vector<double> mid_rank_quantiles(std::span<const double> losses);
double probit(double q);
double normal_cdf(double z);

// --- per-iteration proposals ----------------------------------------------

Configuration next_random(const SearchSpace& space, Rng& rng);

// Plain BO on the current task's evaluations within `box` (full cube if
// omitted). Falls back to a uniform sample on GP failure.
Configuration next_bo(const SearchSpace& space,
                      std::span<const Evaluation> current,
                      const SchedulerConfig& config, Rng& rng,
                      const std::optional<BoundingBox>& box = std::nullopt);

Configuration next_bounding_box(const SearchSpace& space,
                                const TaskHistory& history,
                                std::span<const Evaluation> current,
                                const SchedulerConfig& config, Rng& rng);

Configuration next_cts(const SearchSpace& space, const TaskHistory& history,
                       std::span<const Evaluation> current,
                       const SchedulerConfig& config, Rng& rng);

// Design matrix of TransferBO: encoded config plus the normalized context
// feature of its task, subsampled to `config.transfer_obs_cap` rows.
struct TransferDataset {
  PointMatrix inputs;
  Eigen::VectorXd targets;
};
TransferDataset transfer_dataset(const SearchSpace& space,
                                 const TaskHistory& history,
                                 std::span<const Evaluation> current,
                                 const TaskInfo& task,
                                 const SchedulerConfig& config, Rng& rng);

Configuration next_transfer_bo(const SearchSpace& space,
                               const TaskHistory& history,
                               std::span<const Evaluation> current,
                               const TaskInfo& task,
                               const SchedulerConfig& config, Rng& rng);

// Stateful driver for one (method, benchmark, seed) run. begin_task() fixes
// per-task state (warm-start list, portfolio); suggest() is called once per
// iteration with the current task's evaluations so far.
class Scheduler {
 public:
  Scheduler(SearchSpace space, SchedulerConfig config);

  void begin_task(const TaskHistory& history, const TaskInfo& task, Rng& rng);
  Configuration suggest(std::span<const Evaluation> current, Rng& rng);

  const SchedulerConfig& config() const { return config_; }
  // Warm-start list or portfolio replayed on the current task.
  const std::vector<Configuration>& replay_list() const { return replay_; }
  const std::optional<BoundingBox>& current_box() const { return box_; }

 private:
  enum class Mode { kRandom, kBO, kReplayThenBO, kReplayThenRandom, kCTS,
                    kTransferBO };

  SearchSpace space_;
  SchedulerConfig config_;
  const TaskHistory* history_ = nullptr;
  TaskInfo task_;
  Mode mode_ = Mode::kBO;
  std::vector<Configuration> replay_;
  std::size_t replay_slots_ = 0;
  std::optional<BoundingBox> box_;
};

}  // namespace othpo
