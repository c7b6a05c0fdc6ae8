#include "othpo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "othpo/errors.hpp"

namespace othpo {

Eigen::VectorXd antithetic_normals(int n, Rng& rng) {
  if (n < 1) throw ValidationError("mc_samples must be >= 1");
  Eigen::VectorXd z(n);
  const int half = n / 2;
  for (int i = 0; i < half; ++i) {
    z[i] = standard_normal(rng);
    z[half + i] = -z[i];
  }
  if (n % 2 == 1) z[n - 1] = standard_normal(rng);
  return z;
}

double mc_expected_improvement(double mean, double stddev, double incumbent,
                               const Eigen::VectorXd& normals) {
  double total = 0.0;
  for (Eigen::Index s = 0; s < normals.size(); ++s) {
    total += std::max(0.0, incumbent - (mean + stddev * normals[s]));
  }
  return total / static_cast<double>(normals.size());
}

double analytic_expected_improvement(double mean, double stddev,
                                     double incumbent) {
  if (stddev <= 0.0) return std::max(0.0, incumbent - mean);
  const double z = (incumbent - mean) / stddev;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return (incumbent - mean) * cdf + stddev * pdf;
}

double mc_ei(const GPModel& model, const Eigen::VectorXd& point,
             const AcquisitionState& state, Rng& rng) {
  const Prediction p = model.predict(point.transpose());
  const Eigen::VectorXd z = antithetic_normals(state.settings.mc_samples, rng);
  return mc_expected_improvement(p.mean[0], std::sqrt(p.variance[0]),
                                 state.incumbent, z);
}

bool UnitBox::contains(const Eigen::VectorXd& point) const {
  return point.size() == lower.size() &&
         (point.array() >= lower.array()).all() &&
         (point.array() <= upper.array()).all();
}

Eigen::VectorXd UnitBox::sample(Rng& rng) const {
  Eigen::VectorXd out = lower;
  for (Eigen::Index d = 0; d < lower.size(); ++d) {
    if (upper[d] > lower[d]) {
      out[d] = lower[d] + uniform01(rng) * (upper[d] - lower[d]);
    }
  }
  return out;
}

Eigen::VectorXd propose_point(const GPModel& model, const UnitBox& box,
                              const AcquisitionState& state, Rng& rng) {
  const auto& settings = state.settings;
  const Eigen::Index dim = box.lower.size();
  if (model.dim() != dim) {
    throw ValidationError("propose: box and model dimensionality differ");
  }
  const int pool = std::max(1, settings.candidate_pool_size);
  PointMatrix candidates(pool, dim);
  for (int c = 0; c < pool; ++c) candidates.row(c) = box.sample(rng).transpose();
  const Eigen::VectorXd z = antithetic_normals(settings.mc_samples, rng);
  // Drawn up front so the fallback does not shift the stream.
  const Eigen::VectorXd fallback = box.sample(rng);

  const auto score_rows = [&](const PointMatrix& pts) {
    const Prediction p = model.predict(pts);
    Eigen::VectorXd ei(pts.rows());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      ei[i] = mc_expected_improvement(p.mean[i], std::sqrt(p.variance[i]),
                                      state.incumbent, z);
    }
    return ei;
  };

  const Eigen::VectorXd scores = score_rows(candidates);
  Eigen::Index best_index = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best_index]) best_index = i;
  }
  double best_score = scores[best_index];
  if (!(best_score > 0.0)) return fallback;
  Eigen::VectorXd best = candidates.row(best_index).transpose();

  double step = settings.local_search_step;
  for (int it = 0; it < settings.local_search_steps; ++it) {
    PointMatrix moves(2 * dim, dim);
    Eigen::Index n_moves = 0;
    for (Eigen::Index d = 0; d < dim; ++d) {
      if (box.upper[d] <= box.lower[d]) continue;
      for (const double sign : {-1.0, 1.0}) {
        Eigen::VectorXd trial = best;
        trial[d] = std::clamp(trial[d] + sign * step, box.lower[d], box.upper[d]);
        moves.row(n_moves++) = trial.transpose();
      }
    }
    if (n_moves == 0) break;
    const Eigen::VectorXd trial_scores = score_rows(moves.topRows(n_moves));
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < n_moves; ++i) {
      if (trial_scores[i] > trial_scores[arg]) arg = i;
    }
    if (trial_scores[arg] > best_score) {
      best_score = trial_scores[arg];
      best = moves.row(arg).transpose();
    } else {
      step *= 0.5;
    }
  }
  return best;
}

Configuration propose(const GPModel& model, const SearchSpace& space,
                      const AcquisitionState& state, Rng& rng) {
  const Eigen::VectorXd point = propose_point(
      model, UnitBox::full(static_cast<Eigen::Index>(space.size())), state, rng);
  return space.decode(point);
}

}  // namespace othpo
