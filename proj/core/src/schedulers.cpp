#include "othpo/schedulers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "othpo/errors.hpp"

namespace othpo {
namespace {

constexpr std::array<Method, 10> kAllMethods = {
    Method::kRandomSearch,   Method::kBO,
    Method::kBoundingBox,    Method::kZeroShot,
    Method::kCTS,            Method::kTransferBO,
    Method::kSimpleOrdered,  Method::kSimpleOrderedShuffled,
    Method::kSimplePrevious, Method::kSimplePreviousNoBO,
};

PointMatrix encode_rows(const SearchSpace& space,
                        std::span<const Evaluation> evals) {
  PointMatrix out(static_cast<Eigen::Index>(evals.size()),
                  static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < evals.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) =
        space.encode(evals[i].config).transpose();
  }
  return out;
}

double best_objective(std::span<const Evaluation> evals) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : evals) best = std::min(best, e.objective);
  return best;
}

// Uniform sample of `cap` row indices (sorted), or all rows when within cap.
std::vector<Eigen::Index> subsample_rows(Eigen::Index n, int cap, Rng& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  if (cap <= 0 || n <= cap) return idx;
  // Partial Fisher-Yates.
  for (Eigen::Index i = 0; i < cap; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(cap));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Configuration clamp_into(const SearchSpace& space, const Configuration& c) {
  std::vector<double> v(c.values().begin(), c.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = std::clamp(v[i], space.dimension(i).lower, space.dimension(i).upper);
  }
  return Configuration(std::move(v));
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kRandomSearch: return "RandomSearch";
    case Method::kBO: return "BO";
    case Method::kBoundingBox: return "BoundingBox";
    case Method::kZeroShot: return "ZeroShot";
    case Method::kCTS: return "CTS";
    case Method::kTransferBO: return "TransferBO";
    case Method::kSimpleOrdered: return "SimpleOrdered";
    case Method::kSimpleOrderedShuffled: return "SimpleOrderedShuffled";
    case Method::kSimplePrevious: return "SimplePrevious";
    case Method::kSimplePreviousNoBO: return "SimplePreviousNoBO";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  std::string valid;
  for (const auto m : kAllMethods) {
    if (!valid.empty()) valid += ", ";
    valid += method_name(m);
  }
  throw ValidationError("unknown method '" + std::string(name) +
                        "'; valid methods: " + valid);
}

std::span<const Method> all_methods() { return kAllMethods; }

bool uses_transfer(Method method) {
  return method != Method::kRandomSearch && method != Method::kBO;
}

double ContextScale::normalize(double feature) const {
  if (kind == ContextKind::kIndex) {
    return n_tasks > 0 ? feature / static_cast<double>(n_tasks) : 0.0;
  }
  if (!(max_feature > min_feature)) return 0.0;
  return (std::log(feature) - std::log(min_feature)) /
         (std::log(max_feature) - std::log(min_feature));
}

Configuration next_random(const SearchSpace& space, Rng& rng) {
  return space.sample_uniform(rng);
}

Configuration next_bo(const SearchSpace& space,
                      std::span<const Evaluation> current,
                      const SchedulerConfig& config, Rng& rng,
                      const std::optional<BoundingBox>& box) {
  const SearchSpace& target = box ? box->space : space;
  if (static_cast<int>(current.size()) < config.initial_design) {
    return target.sample_uniform(rng);
  }
  const UnitBox unit =
      box ? box->box : UnitBox::full(static_cast<Eigen::Index>(space.size()));
  const PointMatrix x = encode_rows(space, current);
  Eigen::VectorXd y(x.rows());
  for (std::size_t i = 0; i < current.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = current[i].objective;
  }
  try {
    const GPModel model = GPModel::fit(x, y, config.gp, rng);
    AcquisitionState state{best_objective(current), config.acquisition};
    const Eigen::VectorXd point = propose_point(model, unit, state, rng);
    return clamp_into(target, space.decode(point));
  } catch (const NumericError&) {
    return target.sample_uniform(rng);
  }
}

Configuration next_bounding_box(const SearchSpace& space,
                                const TaskHistory& history,
                                std::span<const Evaluation> current,
                                const SchedulerConfig& config, Rng& rng) {
  return next_bo(space, current, config, rng,
                 bounding_box_for_task(space, history));
}

Configuration next_cts(const SearchSpace& space, const TaskHistory& history,
                       std::span<const Evaluation> current,
                       const SchedulerConfig& config, Rng& rng) {
  std::vector<const Evaluation*> rows;
  std::vector<double> z;
  const auto add_task = [&](std::span<const Evaluation> evals) {
    std::vector<double> losses;
    for (const auto& e : evals) losses.push_back(e.objective);
    const auto q = mid_rank_quantiles(losses);
    for (std::size_t i = 0; i < evals.size(); ++i) {
      rows.push_back(&evals[i]);
      z.push_back(probit(q[i]));
    }
  };
  for (const auto& task : history.tasks) add_task(task);
  if (current.size() >= 2) {
    add_task(current);
  } else if (current.size() == 1) {
    rows.push_back(&current[0]);
    z.push_back(0.0);
  }
  if (rows.empty()) return next_bo(space, current, config, rng);

  const auto keep = subsample_rows(static_cast<Eigen::Index>(rows.size()),
                                   config.transfer_obs_cap, rng);
  PointMatrix x(static_cast<Eigen::Index>(keep.size()),
                static_cast<Eigen::Index>(space.size()));
  Eigen::VectorXd y(x.rows());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const auto k = static_cast<std::size_t>(keep[i]);
    x.row(static_cast<Eigen::Index>(i)) = space.encode(rows[k]->config).transpose();
    y[static_cast<Eigen::Index>(i)] = z[k];
  }

  std::vector<Configuration> pool;
  for (const auto& task : history.tasks) {
    for (const auto& e : task) {
      if (std::find(pool.begin(), pool.end(), e.config) == pool.end()) {
        pool.push_back(e.config);
      }
    }
  }
  for (int i = 0; i < config.cts_candidate_pool; ++i) {
    pool.push_back(space.sample_uniform(rng));
  }
  PointMatrix candidates(static_cast<Eigen::Index>(pool.size()),
                         static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    candidates.row(static_cast<Eigen::Index>(i)) = space.encode(pool[i]).transpose();
  }

  try {
    const GPModel model = GPModel::fit(x, y, config.gp, rng);
    const Eigen::MatrixXd draw = model.sample_posterior(candidates, 1, rng);
    Eigen::Index best = 0;
    draw.row(0).minCoeff(&best);
    return pool[static_cast<std::size_t>(best)];
  } catch (const NumericError&) {
    return space.sample_uniform(rng);
  }
}

TransferDataset transfer_dataset(const SearchSpace& space,
                                 const TaskHistory& history,
                                 std::span<const Evaluation> current,
                                 const TaskInfo& task,
                                 const SchedulerConfig& config, Rng& rng) {
  std::vector<const Evaluation*> rows;
  std::vector<double> features;
  for (std::size_t t = 0; t < history.tasks.size(); ++t) {
    const double f = task.scale.normalize(
        t < history.context_features.size() ? history.context_features[t]
                                            : static_cast<double>(t + 1));
    for (const auto& e : history.tasks[t]) {
      rows.push_back(&e);
      features.push_back(f);
    }
  }
  const double current_feature = task.scale.normalize(task.context_feature);
  for (const auto& e : current) {
    rows.push_back(&e);
    features.push_back(current_feature);
  }
  const auto keep = subsample_rows(static_cast<Eigen::Index>(rows.size()),
                                   config.transfer_obs_cap, rng);
  const auto dim = static_cast<Eigen::Index>(space.size());
  TransferDataset out;
  out.inputs.resize(static_cast<Eigen::Index>(keep.size()), dim + 1);
  out.targets.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const auto k = static_cast<std::size_t>(keep[i]);
    const auto r = static_cast<Eigen::Index>(i);
    out.inputs.row(r).head(dim) = space.encode(rows[k]->config).transpose();
    out.inputs(r, dim) = features[k];
    out.targets[r] = rows[k]->objective;
  }
  return out;
}

Configuration next_transfer_bo(const SearchSpace& space,
                               const TaskHistory& history,
                               std::span<const Evaluation> current,
                               const TaskInfo& task,
                               const SchedulerConfig& config, Rng& rng) {
  std::size_t pooled = current.size();
  for (const auto& t : history.tasks) pooled += t.size();
  if (static_cast<int>(pooled) < config.initial_design) {
    return space.sample_uniform(rng);
  }
  const TransferDataset data =
      transfer_dataset(space, history, current, task, config, rng);
  const auto dim = static_cast<Eigen::Index>(space.size());
  const double feature = task.scale.normalize(task.context_feature);
  UnitBox box = UnitBox::full(dim + 1);
  box.lower[dim] = box.upper[dim] = feature;
  try {
    const GPModel model = GPModel::fit(data.inputs, data.targets, config.gp, rng);
    double incumbent = best_objective(current);
    if (current.empty()) {
      // No observation on this task yet: the best predicted mean at this
      // task's feature over the pooled configurations.
      PointMatrix at_task = data.inputs;
      at_task.col(dim).setConstant(feature);
      incumbent = model.predict(at_task).mean.minCoeff();
    }
    AcquisitionState state{incumbent, config.acquisition};
    const Eigen::VectorXd point = propose_point(model, box, state, rng);
    return space.decode(point.head(dim));
  } catch (const NumericError&) {
    return space.sample_uniform(rng);
  }
}

Scheduler::Scheduler(SearchSpace space, SchedulerConfig config)
    : space_(std::move(space)), config_(std::move(config)) {
  if (config_.n_warm_start < 1) throw ValidationError("N must be >= 1");
}

void Scheduler::begin_task(const TaskHistory& history, const TaskInfo& task,
                           Rng& rng) {
  history_ = &history;
  task_ = task;
  replay_.clear();
  replay_slots_ = 0;
  box_.reset();

  const bool has_previous = std::any_of(
      history.tasks.begin(), history.tasks.end(),
      [](const TaskEvaluations& t) { return !t.empty(); });
  const Method method = config_.method;
  if (method == Method::kRandomSearch) {
    mode_ = Mode::kRandom;
    return;
  }
  // Transfer methods collect their first task with plain BO.
  if (method == Method::kBO || !has_previous) {
    mode_ = Mode::kBO;
    return;
  }
  const auto n = static_cast<std::size_t>(config_.n_warm_start);
  switch (method) {
    case Method::kBoundingBox:
      mode_ = Mode::kBO;
      box_ = bounding_box_for_task(space_, history);
      break;
    case Method::kZeroShot:
      mode_ = Mode::kReplayThenRandom;
      replay_ = build_zeroshot_portfolio(space_, history, task.budget);
      replay_slots_ = replay_.size();
      break;
    case Method::kCTS:
      mode_ = Mode::kCTS;
      break;
    case Method::kTransferBO:
      mode_ = Mode::kTransferBO;
      break;
    case Method::kSimpleOrdered:
    case Method::kSimpleOrderedShuffled:
      mode_ = Mode::kReplayThenBO;
      replay_ = simple_ordered_warm_start(history, config_.n_warm_start);
      replay_slots_ = n;
      if (method == Method::kSimpleOrderedShuffled) {
        for (std::size_t i = replay_.size(); i > 1; --i) {
          std::uniform_int_distribution<std::size_t> pick(0, i - 1);
          std::swap(replay_[i - 1], replay_[pick(rng)]);
        }
      }
      break;
    case Method::kSimplePrevious:
      mode_ = Mode::kReplayThenBO;
      replay_ = simple_previous_warm_start(history, config_.n_warm_start);
      replay_slots_ = n;
      break;
    case Method::kSimplePreviousNoBO:
      mode_ = Mode::kReplayThenRandom;
      replay_ = simple_previous_warm_start(history, -1);
      replay_slots_ = replay_.size();
      break;
    default:
      mode_ = Mode::kBO;
  }
}

Configuration Scheduler::suggest(std::span<const Evaluation> current, Rng& rng) {
  if (history_ == nullptr) {
    throw ValidationError("Scheduler::suggest called before begin_task");
  }
  const std::size_t k = current.size();  // 0-based iteration
  switch (mode_) {
    case Mode::kRandom:
      return next_random(space_, rng);
    case Mode::kBO:
      return next_bo(space_, current, config_, rng, box_);
    case Mode::kCTS:
      return next_cts(space_, *history_, current, config_, rng);
    case Mode::kTransferBO:
      return next_transfer_bo(space_, *history_, current, task_, config_, rng);
    case Mode::kReplayThenBO:
    case Mode::kReplayThenRandom:
      if (k < replay_slots_) {
        return k < replay_.size() ? replay_[k] : next_random(space_, rng);
      }
      if (mode_ == Mode::kReplayThenRandom) return next_random(space_, rng);
      return next_bo(space_, current, config_, rng);
  }
  return next_random(space_, rng);
}

}  // namespace othpo
