#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/erf.hpp>

#include "othpo/errors.hpp"
#include "othpo/schedulers.hpp"

namespace othpo {
namespace {

bool contains(const std::vector<Configuration>& list, const Configuration& c) {
  return std::find(list.begin(), list.end(), c) != list.end();
}

}  // namespace

const Configuration& task_optimum(const TaskEvaluations& task) {
  if (task.empty()) throw ValidationError("task has no evaluations");
  const auto it = std::min_element(
      task.begin(), task.end(),
      [](const Evaluation& a, const Evaluation& b) {
        return a.objective < b.objective;
      });
  return it->config;
}

std::vector<Evaluation> ranked_distinct(const TaskEvaluations& task) {
  std::vector<Evaluation> out;
  for (const auto& e : task) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const auto& o) {
      return o.config == e.config;
    });
    if (!seen) out.push_back(e);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Evaluation& a, const Evaluation& b) {
                     return a.objective < b.objective;
                   });
  return out;
}

std::vector<Configuration> simple_ordered_warm_start(const TaskHistory& history,
                                                     int count) {
  // Candidate order: one optimum per task (newest first), the remaining
  // joint optima, then rank-2 entries of each task, rank-3, ...
  std::vector<Configuration> queue;
  std::vector<std::vector<Evaluation>> rest;
  std::vector<Configuration> joint_tail;
  for (auto it = history.tasks.rbegin(); it != history.tasks.rend(); ++it) {
    std::vector<Evaluation> ranked = ranked_distinct(*it);
    if (ranked.empty()) {
      rest.emplace_back();
      continue;
    }
    const double best = ranked.front().objective;
    queue.push_back(ranked.front().config);
    std::size_t k = 1;
    for (; k < ranked.size() && ranked[k].objective == best; ++k) {
      joint_tail.push_back(ranked[k].config);
    }
    rest.emplace_back(ranked.begin() + static_cast<std::ptrdiff_t>(k),
                      ranked.end());
  }
  queue.insert(queue.end(), joint_tail.begin(), joint_tail.end());
  std::size_t longest = 0;
  for (const auto& r : rest) longest = std::max(longest, r.size());
  for (std::size_t level = 0; level < longest; ++level) {
    for (const auto& r : rest) {
      if (level < r.size()) queue.push_back(r[level].config);
    }
  }

  std::vector<Configuration> out;
  for (auto& c : queue) {
    if (static_cast<int>(out.size()) >= count) break;
    if (!contains(out, c)) out.push_back(std::move(c));
  }
  return out;
}

std::vector<Configuration> simple_previous_warm_start(
    const TaskHistory& history, int count) {
  std::vector<Configuration> out;
  if (history.tasks.empty()) return out;
  for (auto& e : ranked_distinct(history.tasks.back())) {
    if (count >= 0 && static_cast<int>(out.size()) >= count) break;
    out.push_back(std::move(e.config));
  }
  return out;
}

std::optional<BoundingBox> bounding_box_for_task(const SearchSpace& space,
                                                 const TaskHistory& history) {
  const auto dim = static_cast<Eigen::Index>(space.size());
  std::vector<Configuration> distinct;
  std::vector<Eigen::VectorXd> optima;
  std::optional<UnitBox> box;
  for (const auto& task : history.tasks) {
    if (task.empty()) continue;
    const Configuration& opt = task_optimum(task);
    if (!contains(distinct, opt)) distinct.push_back(opt);
    optima.push_back(space.encode(opt));
    if (distinct.size() < 2) continue;

    UnitBox hull{optima.front(), optima.front()};
    for (const auto& o : optima) {
      hull.lower = hull.lower.cwiseMin(o);
      hull.upper = hull.upper.cwiseMax(o);
    }
    if (box) {
      for (Eigen::Index d = 0; d < dim; ++d) {
        const double lo = std::max(box->lower[d], hull.lower[d]);
        const double hi = std::min(box->upper[d], hull.upper[d]);
        // Disjoint only for histories not produced by this method; keep the
        // previous interval then.
        if (lo <= hi) {
          box->lower[d] = lo;
          box->upper[d] = hi;
        }
      }
    } else {
      box = hull;
    }
  }
  if (!box) return std::nullopt;

  const Configuration lo = space.decode(box->lower);
  const Configuration hi = space.decode(box->upper);
  return BoundingBox{*box, space.restrict(lo.values(), hi.values())};
}

double portfolio_objective(const Eigen::MatrixXd& losses,
                           std::span<const Eigen::Index> members) {
  if (members.empty()) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (Eigen::Index t = 0; t < losses.cols(); ++t) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto m : members) best = std::min(best, losses(m, t));
    total += best;
  }
  return total;
}

std::vector<Eigen::Index> greedy_portfolio(const Eigen::MatrixXd& losses,
                                           int budget) {
  const Eigen::Index n = losses.rows();
  const Eigen::VectorXd row_sums = losses.rowwise().sum();
  std::vector<Eigen::Index> chosen;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  Eigen::VectorXd covered =
      Eigen::VectorXd::Constant(losses.cols(), std::numeric_limits<double>::infinity());
  while (static_cast<int>(chosen.size()) < budget &&
         static_cast<Eigen::Index>(chosen.size()) < n) {
    Eigen::Index best = -1;
    double best_obj = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      const double obj = covered.cwiseMin(losses.row(c).transpose()).sum();
      if (best < 0 || obj < best_obj ||
          (obj == best_obj && row_sums[c] < row_sums[best])) {
        best = c;
        best_obj = obj;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    chosen.push_back(best);
    covered = covered.cwiseMin(losses.row(best).transpose());
  }
  return chosen;
}

PortfolioProblem zeroshot_loss_matrix(const SearchSpace& space,
                                      const TaskHistory& history) {
  PortfolioProblem out;
  for (const auto& task : history.tasks) {
    for (const auto& e : task) {
      if (!contains(out.candidates, e.config)) out.candidates.push_back(e.config);
    }
  }
  if (out.candidates.empty()) {
    throw ValidationError("ZeroShot portfolio requires a non-empty history");
  }
  const auto n = static_cast<Eigen::Index>(out.candidates.size());
  std::vector<Eigen::VectorXd> encoded;
  encoded.reserve(out.candidates.size());
  for (const auto& c : out.candidates) encoded.push_back(space.encode(c));

  std::vector<const TaskEvaluations*> tasks;
  for (const auto& t : history.tasks) {
    if (!t.empty()) tasks.push_back(&t);
  }
  out.normalized_losses.resize(n, static_cast<Eigen::Index>(tasks.size()));
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto& evals = *tasks[t];
    std::vector<Eigen::VectorXd> observed;
    for (const auto& e : evals) observed.push_back(space.encode(e.config));
    for (Eigen::Index c = 0; c < n; ++c) {
      // Exact match first (first occurrence), else the nearest neighbour.
      std::size_t pick = evals.size();
      for (std::size_t k = 0; k < evals.size(); ++k) {
        if (evals[k].config == out.candidates[static_cast<std::size_t>(c)]) {
          pick = k;
          break;
        }
      }
      if (pick == evals.size()) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < evals.size(); ++k) {
          const double d2 =
              (observed[k] - encoded[static_cast<std::size_t>(c)]).squaredNorm();
          if (d2 < best) {
            best = d2;
            pick = k;
          }
        }
      }
      out.normalized_losses(c, static_cast<Eigen::Index>(t)) =
          evals[pick].objective;
    }
    auto col = out.normalized_losses.col(static_cast<Eigen::Index>(t));
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (hi > lo) {
      col = (col.array() - lo) / (hi - lo);
    } else {
      col.setZero();
    }
  }
  return out;
}

std::vector<Configuration> build_zeroshot_portfolio(const SearchSpace& space,
                                                    const TaskHistory& history,
                                                    int budget) {
  const PortfolioProblem problem = zeroshot_loss_matrix(space, history);
  std::vector<Configuration> out;
  for (const auto idx : greedy_portfolio(problem.normalized_losses, budget)) {
    out.push_back(problem.candidates[static_cast<std::size_t>(idx)]);
  }
  return out;
}

std::vector<double> mid_rank_quantiles(std::span<const double> losses) {
  const std::size_t n = losses.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return losses[a] < losses[b];
  });
  std::vector<double> q(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start;
    while (end + 1 < n && losses[order[end + 1]] == losses[order[start]]) ++end;
    // 1-based ranks start+1 .. end+1 share their average.
    const double rank = 0.5 * static_cast<double>(start + end) + 1.0;
    for (std::size_t k = start; k <= end; ++k) {
      q[order[k]] = (rank - 0.5) / static_cast<double>(n);
    }
    start = end + 1;
  }
  return q;
}

double probit(double q) {
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("probit: q outside (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace othpo
