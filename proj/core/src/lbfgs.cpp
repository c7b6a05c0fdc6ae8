#include "othpo/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace othpo {
namespace {

struct CurvaturePair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

// Free variables: not pinned at a bound by the gradient.
Eigen::VectorXd free_mask(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                          const Eigen::VectorXd& lower,
                          const Eigen::VectorXd& upper) {
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if ((x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0)) {
      mask[i] = 0.0;
    }
  }
  return mask;
}

Eigen::VectorXd two_loop(const std::deque<CurvaturePair>& memory,
                         const Eigen::VectorXd& g) {
  Eigen::VectorXd q = g;
  std::vector<double> alphas(memory.size());
  for (std::size_t k = memory.size(); k-- > 0;) {
    alphas[k] = memory[k].rho * memory[k].s.dot(q);
    q -= alphas[k] * memory[k].y;
  }
  if (!memory.empty()) {
    const auto& last = memory.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t k = 0; k < memory.size(); ++k) {
    const double beta = memory[k].rho * memory[k].y.dot(q);
    q += (alphas[k] - beta) * memory[k].s;
  }
  return -q;
}

}  // namespace

LbfgsResult minimize_lbfgs_box(const GradientObjective& objective,
                               Eigen::VectorXd x0,
                               const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper,
                               const LbfgsOptions& options) {
  const auto project = [&](Eigen::VectorXd v) {
    return v.cwiseMax(lower).cwiseMin(upper).eval();
  };

  LbfgsResult result;
  Eigen::VectorXd x = project(std::move(x0));
  Eigen::VectorXd g(x.size());
  double f = objective(x, g);
  result.x = x;
  result.value = f;
  if (!std::isfinite(f)) return result;

  std::deque<CurvaturePair> memory;
  Eigen::VectorXd previous_mask;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter;
    const Eigen::VectorXd mask = free_mask(x, g, lower, upper);
    const Eigen::VectorXd pg = g.cwiseProduct(mask);
    if (pg.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      result.converged = true;
      break;
    }
    if (previous_mask.size() == mask.size() && previous_mask != mask) {
      memory.clear();
    }
    previous_mask = mask;

    Eigen::VectorXd d = two_loop(memory, pg).cwiseProduct(mask);
    if (d.dot(pg) >= 0.0) {
      memory.clear();
      d = -pg;
    }
    double step = memory.empty() ? std::min(1.0, 1.0 / pg.norm()) : 1.0;

    Eigen::VectorXd x_new;
    Eigen::VectorXd g_new(x.size());
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int backtrack = 0; backtrack < 40; ++backtrack) {
      x_new = project(x + step * d);
      f_new = objective(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (memory.empty()) break;
      memory.clear();
      continue;
    }

    CurvaturePair pair{x_new - x, g_new - g, 0.0};
    const double sy = pair.s.dot(pair.y);
    if (sy > 1e-10 * pair.s.norm() * pair.y.norm()) {
      pair.rho = 1.0 / sy;
      memory.push_back(std::move(pair));
      if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
    }

    const double decrease = f - f_new;
    x = std::move(x_new);
    g = g_new;
    f = f_new;
    result.iterations = iter + 1;
    if (decrease <=
        options.relative_function_tolerance * std::max(1.0, std::abs(f))) {
      const Eigen::VectorXd pg_new =
          g.cwiseProduct(free_mask(x, g, lower, upper));
      result.converged =
          pg_new.lpNorm<Eigen::Infinity>() < options.gradient_tolerance;
      break;
    }
  }
  result.x = x;
  result.value = f;
  return result;
}

}  // namespace othpo
