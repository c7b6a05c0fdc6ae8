#include "othpo/gaussian_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "othpo/errors.hpp"
#include "othpo/lbfgs.hpp"

namespace othpo {
namespace {

constexpr double kSqrt5 = 2.23606797749978969641;

// Log-space search box for fit().
constexpr double kLogSignalMin = -4.605170185988091;   // ln 0.01
constexpr double kLogSignalMax = 4.605170185988091;    // ln 100
constexpr double kLogNoiseMin = -13.815510557964274;   // ln 1e-6
constexpr double kLogNoiseMax = 0.6931471805599453;    // ln 2
constexpr double kLogLengthMin = -4.605170185988091;   // ln 0.01
constexpr double kLogLengthMax = 2.995732273553991;    // ln 20
constexpr double kLogWarpMin = -2.302585092994046;     // ln 0.1
constexpr double kLogWarpMax = 2.302585092994046;      // ln 10

constexpr double kConstantTargetVariance = 1e-12;

// Matérn 5/2 profile as a function of scaled distance r (signal excluded).
double matern_profile(double r) {
  return (1.0 + kSqrt5 * r + 5.0 * r * r / 3.0) * std::exp(-kSqrt5 * r);
}

// -(1/r) d profile / dr, finite at r = 0.
double matern_slope(double r) {
  return 5.0 / 3.0 * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
}

// d w / d log a and d w / d log b for the Kumaraswamy CDF.
void warp_log_derivatives(double x, double a, double b, double& d_log_a,
                          double& d_log_b) {
  d_log_a = 0.0;
  d_log_b = 0.0;
  if (x <= 0.0 || x >= 1.0) return;
  const double xa = std::pow(x, a);
  const double one_minus = 1.0 - xa;
  if (one_minus <= 0.0) return;
  d_log_a = a * b * std::pow(one_minus, b - 1.0) * xa * std::log(x);
  d_log_b = -b * std::pow(one_minus, b) * std::log(one_minus);
}

void validate_kernel(const KernelParams& params) {
  if (!(params.signal_variance > 0.0) || !(params.noise_variance > 0.0) ||
      !(params.lengthscales.array() > 0.0).all()) {
    throw ValidationError("kernel parameters must be strictly positive");
  }
}

PointMatrix scale_columns(const PointMatrix& points,
                          const Eigen::VectorXd& lengthscales) {
  return points * lengthscales.cwiseInverse().asDiagonal();
}

}  // namespace

double matern52(const Eigen::Ref<const Eigen::VectorXd>& x1,
                const Eigen::Ref<const Eigen::VectorXd>& x2,
                const KernelParams& params) {
  validate_kernel(params);
  if (x1.size() != x2.size() || x1.size() != params.lengthscales.size()) {
    throw ValidationError("matern52: dimensionality mismatch");
  }
  const double r =
      (x1 - x2).cwiseQuotient(params.lengthscales).norm();
  return params.signal_variance * matern_profile(r);
}

double kumaraswamy_cdf(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - std::pow(x, a), b);
}

Eigen::VectorXd warp(const Eigen::Ref<const Eigen::VectorXd>& point,
                     const WarpParams& params) {
  Eigen::VectorXd out(point.size());
  for (Eigen::Index d = 0; d < point.size(); ++d) {
    out[d] = kumaraswamy_cdf(point[d], params.a[d], params.b[d]);
  }
  return out;
}

PointMatrix warp_rows(const PointMatrix& points, const WarpParams& params) {
  PointMatrix out(points.rows(), points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index d = 0; d < points.cols(); ++d) {
      out(i, d) = kumaraswamy_cdf(points(i, d), params.a[d], params.b[d]);
    }
  }
  return out;
}

HyperParameters HyperParameters::defaults(Eigen::Index dim) {
  HyperParameters p;
  p.kernel.signal_variance = 1.0;
  p.kernel.noise_variance = 1e-3;
  p.kernel.lengthscales = Eigen::VectorXd::Constant(dim, 0.25);
  p.warping = WarpParams::identity(dim);
  return p;
}

HyperParameters HyperParameters::from_log_vector(const Eigen::VectorXd& theta) {
  const Eigen::Index d = (theta.size() - 2) / 3;
  HyperParameters p;
  p.kernel.signal_variance = std::exp(theta[0]);
  p.kernel.noise_variance = std::exp(theta[1]);
  p.kernel.lengthscales = theta.segment(2, d).array().exp();
  p.warping.a = theta.segment(2 + d, d).array().exp();
  p.warping.b = theta.segment(2 + 2 * d, d).array().exp();
  return p;
}

Eigen::VectorXd HyperParameters::to_log_vector() const {
  const Eigen::Index d = dim();
  Eigen::VectorXd theta(2 + 3 * d);
  theta[0] = std::log(kernel.signal_variance);
  theta[1] = std::log(kernel.noise_variance);
  theta.segment(2, d) = kernel.lengthscales.array().log();
  theta.segment(2 + d, d) = warping.a.array().log();
  theta.segment(2 + 2 * d, d) = warping.b.array().log();
  return theta;
}

Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& matrix,
                                     double* jitter_used) {
  Eigen::LLT<Eigen::MatrixXd> llt(matrix);
  if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite()) {
    if (jitter_used) *jitter_used = 0.0;
    return llt.matrixL();
  }
  const Eigen::Index n = matrix.rows();
  for (double jitter = 1e-8; jitter <= 1e-4 * 1.0000001; jitter *= 10.0) {
    Eigen::MatrixXd shifted = matrix;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd l = llt.matrixL();
      if (l.allFinite()) {
        if (jitter_used) *jitter_used = jitter;
        return l;
      }
    }
  }
  throw NumericError("Cholesky factorization failed for " + std::to_string(n) +
                     "x" + std::to_string(n) +
                     " matrix after jitter escalation to 1e-4");
}

LikelihoodValue log_marginal_likelihood(const HyperParameters& params,
                                        const PointMatrix& inputs,
                                        const Eigen::VectorXd& targets) {
  const Eigen::Index n = inputs.rows();
  const Eigen::Index dim = inputs.cols();
  const double signal = params.kernel.signal_variance;
  const Eigen::VectorXd& ls = params.kernel.lengthscales;

  const PointMatrix warped = warp_rows(inputs, params.warping);
  const PointMatrix scaled = scale_columns(warped, ls);

  Eigen::MatrixXd dist(n, n);
  Eigen::MatrixXd k_free(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    k_free(i, i) = signal;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r = (scaled.row(i) - scaled.row(j)).norm();
      dist(i, j) = dist(j, i) = r;
      k_free(i, j) = k_free(j, i) = signal * matern_profile(r);
    }
  }
  Eigen::MatrixXd k = k_free;
  k.diagonal().array() += params.kernel.noise_variance;

  double jitter = 0.0;
  const Eigen::MatrixXd chol = cholesky_with_jitter(k, &jitter);
  const auto lower = chol.triangularView<Eigen::Lower>();
  Eigen::VectorXd alpha = lower.solve(targets);
  lower.transpose().solveInPlace(alpha);

  LikelihoodValue out;
  out.value = -0.5 * targets.dot(alpha) -
              chol.diagonal().array().log().sum() -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

  Eigen::MatrixXd k_inv = Eigen::MatrixXd::Identity(n, n);
  lower.solveInPlace(k_inv);
  lower.transpose().solveInPlace(k_inv);
  const Eigen::MatrixXd q = alpha * alpha.transpose() - k_inv;

  out.gradient = Eigen::VectorXd::Zero(2 + 3 * dim);
  out.gradient[0] = 0.5 * q.cwiseProduct(k_free).sum();
  out.gradient[1] = 0.5 * params.kernel.noise_variance * q.trace();

  // Per-point warp derivatives, n x dim each.
  Eigen::MatrixXd dw_da(n, dim);
  Eigen::MatrixXd dw_db(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index d = 0; d < dim; ++d) {
      warp_log_derivatives(inputs(i, d), params.warping.a[d],
                           params.warping.b[d], dw_da(i, d), dw_db(i, d));
    }
  }

  // Off-diagonal pairs only: every lengthscale and warp derivative of the
  // kernel vanishes on the diagonal. The factor 1/2 cancels the pair symmetry.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double c = q(i, j) * signal * matern_slope(dist(i, j));
      for (Eigen::Index d = 0; d < dim; ++d) {
        const double diff = warped(i, d) - warped(j, d);
        if (diff == 0.0) continue;
        const double inv_l2 = 1.0 / (ls[d] * ls[d]);
        out.gradient[2 + d] += c * diff * diff * inv_l2;
        const double g = -c * diff * inv_l2;
        out.gradient[2 + dim + d] += g * (dw_da(i, d) - dw_da(j, d));
        out.gradient[2 + 2 * dim + d] += g * (dw_db(i, d) - dw_db(j, d));
      }
    }
  }
  (void)jitter;
  return out;
}

LikelihoodValue log_posterior_objective(const HyperParameters& params,
                                        const PointMatrix& inputs,
                                        const Eigen::VectorXd& targets) {
  LikelihoodValue out = log_marginal_likelihood(params, inputs, targets);
  const Eigen::Index dim = inputs.cols();
  constexpr double kPriorVar = kWarpPriorStddev * kWarpPriorStddev;
  for (Eigen::Index d = 0; d < dim; ++d) {
    const double log_a = std::log(params.warping.a[d]);
    const double log_b = std::log(params.warping.b[d]);
    out.value -= 0.5 * (log_a * log_a + log_b * log_b) / kPriorVar;
    out.gradient[2 + dim + d] -= log_a / kPriorVar;
    out.gradient[2 + 2 * dim + d] -= log_b / kPriorVar;
  }
  return out;
}

GPModel GPModel::fit(const PointMatrix& inputs, const Eigen::VectorXd& targets,
                     const GPFitOptions& options, Rng& rng) {
  const Eigen::Index n = inputs.rows();
  const Eigen::Index dim = inputs.cols();
  if (n == 0 || targets.size() != n) {
    throw ValidationError("GP fit requires at least one observation and "
                          "matching target count");
  }
  const int restarts = std::max(1, options.restarts);

  // One seed per restart regardless of outcome keeps rng consumption fixed.
  std::vector<std::uint64_t> restart_seeds(static_cast<std::size_t>(restarts));
  for (auto& s : restart_seeds) s = rng();

  const double mean = targets.mean();
  const double var =
      n > 1 ? (targets.array() - mean).square().sum() / static_cast<double>(n - 1)
            : 0.0;
  if (var < kConstantTargetVariance) {
    return condition(inputs, targets, HyperParameters::defaults(dim));
  }
  const Eigen::VectorXd standardized =
      (targets.array() - mean) / std::sqrt(var);

  std::vector<Eigen::Index> active;
  for (Eigen::Index d = 0; d < dim; ++d) {
    if (inputs.col(d).maxCoeff() - inputs.col(d).minCoeff() > 0.0) {
      active.push_back(d);
    }
  }
  const auto n_active = static_cast<Eigen::Index>(active.size());
  const Eigen::Index n_free = 2 + 3 * n_active;

  // Map between the reduced optimization vector and the full log vector.
  const HyperParameters defaults = HyperParameters::defaults(dim);
  const Eigen::VectorXd theta_default = defaults.to_log_vector();
  std::vector<Eigen::Index> to_full(static_cast<std::size_t>(n_free));
  to_full[0] = 0;
  to_full[1] = 1;
  for (Eigen::Index k = 0; k < n_active; ++k) {
    const Eigen::Index d = active[static_cast<std::size_t>(k)];
    to_full[static_cast<std::size_t>(2 + k)] = 2 + d;
    to_full[static_cast<std::size_t>(2 + n_active + k)] = 2 + dim + d;
    to_full[static_cast<std::size_t>(2 + 2 * n_active + k)] = 2 + 2 * dim + d;
  }
  const auto expand = [&](const Eigen::VectorXd& reduced) {
    Eigen::VectorXd full = theta_default;
    for (Eigen::Index k = 0; k < n_free; ++k) {
      full[to_full[static_cast<std::size_t>(k)]] = reduced[k];
    }
    return full;
  };

  Eigen::VectorXd lower(n_free);
  Eigen::VectorXd upper(n_free);
  lower[0] = kLogSignalMin;
  upper[0] = kLogSignalMax;
  lower[1] = kLogNoiseMin;
  upper[1] = kLogNoiseMax;
  lower.segment(2, n_active).setConstant(kLogLengthMin);
  upper.segment(2, n_active).setConstant(kLogLengthMax);
  lower.tail(2 * n_active).setConstant(kLogWarpMin);
  upper.tail(2 * n_active).setConstant(kLogWarpMax);

  const GradientObjective objective = [&](const Eigen::VectorXd& reduced,
                                          Eigen::VectorXd& grad) {
    try {
      const auto params = HyperParameters::from_log_vector(expand(reduced));
      const auto lv = log_posterior_objective(params, inputs, standardized);
      if (!std::isfinite(lv.value) || !lv.gradient.allFinite()) {
        return std::numeric_limits<double>::infinity();
      }
      grad.resize(n_free);
      for (Eigen::Index k = 0; k < n_free; ++k) {
        grad[k] = -lv.gradient[to_full[static_cast<std::size_t>(k)]];
      }
      return -lv.value;
    } catch (const NumericError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  LbfgsOptions lbfgs;
  lbfgs.max_iterations = options.max_iterations;

  double best_value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta;
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd x0(n_free);
    if (r == 0) {
      for (Eigen::Index k = 0; k < n_free; ++k) {
        x0[k] = theta_default[to_full[static_cast<std::size_t>(k)]];
      }
    } else {
      Rng local(restart_seeds[static_cast<std::size_t>(r)]);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const auto log_uniform = [&](double lo, double hi) {
        return std::log(lo) + u(local) * (std::log(hi) - std::log(lo));
      };
      x0[0] = log_uniform(0.3, 3.0);
      x0[1] = log_uniform(1e-5, 1e-1);
      for (Eigen::Index k = 0; k < n_active; ++k) {
        x0[2 + k] = log_uniform(0.05, 1.0);
      }
      for (Eigen::Index k = 0; k < 2 * n_active; ++k) {
        x0[2 + n_active + k] = std::clamp(
            kWarpPriorStddev * (2.0 * u(local) - 1.0), kLogWarpMin, kLogWarpMax);
      }
    }
    const LbfgsResult res = minimize_lbfgs_box(objective, x0, lower, upper, lbfgs);
    if (std::isfinite(res.value) && res.value < best_value) {
      best_value = res.value;
      best_theta = res.x;
    }
  }
  if (!std::isfinite(best_value)) {
    throw NumericError("GP fit failed on every restart");
  }
  GPModel model = condition(
      inputs, targets, HyperParameters::from_log_vector(expand(best_theta)));
  model.log_objective_ = -best_value;
  return model;
}

GPModel GPModel::condition(const PointMatrix& inputs,
                           const Eigen::VectorXd& targets,
                           const HyperParameters& params) {
  const Eigen::Index n = inputs.rows();
  if (n == 0 || targets.size() != n) {
    throw ValidationError("GP requires at least one observation and matching "
                          "target count");
  }
  if (params.dim() != inputs.cols() || params.warping.a.size() != inputs.cols() ||
      params.warping.b.size() != inputs.cols()) {
    throw ValidationError("GP hyperparameters do not match input dimension");
  }
  validate_kernel(params.kernel);
  if (!(params.warping.a.array() > 0.0).all() ||
      !(params.warping.b.array() > 0.0).all()) {
    throw ValidationError("warping parameters must be strictly positive");
  }

  GPModel m;
  m.inputs_ = inputs;
  m.params_ = params;
  m.target_mean_ = targets.mean();
  const double var =
      n > 1 ? (targets.array() - m.target_mean_).square().sum() /
                  static_cast<double>(n - 1)
            : 0.0;
  if (var < kConstantTargetVariance) {
    m.constant_ = true;
    m.target_std_ = 1.0;
    m.targets_ = Eigen::VectorXd::Zero(n);
    return m;
  }
  m.target_std_ = std::sqrt(var);
  m.targets_ = (targets.array() - m.target_mean_) / m.target_std_;
  m.factorize();
  return m;
}

void GPModel::factorize() {
  warped_ = scale_columns(warp_rows(inputs_, params_.warping),
                          params_.kernel.lengthscales);
  const Eigen::Index n = inputs_.rows();
  Eigen::MatrixXd k(n, n);
  const double signal = params_.kernel.signal_variance;
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = signal + params_.kernel.noise_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      k(i, j) = k(j, i) =
          signal * matern_profile((warped_.row(i) - warped_.row(j)).norm());
    }
  }
  chol_ = cholesky_with_jitter(k, &jitter_);
  const Eigen::MatrixXd& chol = chol_;
  const auto lower = chol.triangularView<Eigen::Lower>();
  alpha_ = lower.solve(targets_);
  lower.transpose().solveInPlace(alpha_);
  log_objective_ = log_posterior_objective(params_, inputs_, targets_).value;
}

Eigen::MatrixXd GPModel::cross_kernel(const PointMatrix& scaled_points) const {
  const double signal = params_.kernel.signal_variance;
  Eigen::MatrixXd out(scaled_points.rows(), warped_.rows());
  for (Eigen::Index i = 0; i < scaled_points.rows(); ++i) {
    for (Eigen::Index j = 0; j < warped_.rows(); ++j) {
      out(i, j) =
          signal * matern_profile((scaled_points.row(i) - warped_.row(j)).norm());
    }
  }
  return out;
}

Prediction GPModel::predict(const PointMatrix& points) const {
  if (points.cols() != dim()) {
    throw ValidationError("predict: point dimensionality mismatch");
  }
  Prediction out;
  if (constant_) {
    out.mean = Eigen::VectorXd::Constant(points.rows(), target_mean_);
    out.variance = Eigen::VectorXd::Zero(points.rows());
    return out;
  }
  const PointMatrix scaled = scale_columns(
      warp_rows(points, params_.warping), params_.kernel.lengthscales);
  const Eigen::MatrixXd k_star = cross_kernel(scaled);
  const Eigen::MatrixXd v =
      chol_.triangularView<Eigen::Lower>().solve(k_star.transpose());
  const double std2 = target_std_ * target_std_;
  out.mean = (k_star * alpha_).array() * target_std_ + target_mean_;
  out.variance =
      ((params_.kernel.signal_variance - v.colwise().squaredNorm().array())
           .max(0.0) *
       std2)
          .matrix()
          .transpose();
  return out;
}

Eigen::MatrixXd GPModel::posterior_covariance(const PointMatrix& points) const {
  const Eigen::Index m = points.rows();
  if (constant_) return Eigen::MatrixXd::Zero(m, m);
  const PointMatrix scaled = scale_columns(
      warp_rows(points, params_.warping), params_.kernel.lengthscales);
  const double signal = params_.kernel.signal_variance;
  Eigen::MatrixXd prior(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    prior(i, i) = signal;
    for (Eigen::Index j = 0; j < i; ++j) {
      prior(i, j) = prior(j, i) =
          signal * matern_profile((scaled.row(i) - scaled.row(j)).norm());
    }
  }
  const Eigen::MatrixXd v =
      chol_.triangularView<Eigen::Lower>().solve(cross_kernel(scaled).transpose());
  Eigen::MatrixXd cov = prior - v.transpose() * v;
  cov = 0.5 * (cov + cov.transpose());
  return cov * (target_std_ * target_std_);
}

Eigen::MatrixXd GPModel::sample_posterior(const PointMatrix& points,
                                          Eigen::Index n_samples,
                                          Rng& rng) const {
  const Eigen::Index m = points.rows();
  const Eigen::VectorXd mean = predict(points).mean;
  Eigen::MatrixXd z(m, n_samples);
  for (Eigen::Index s = 0; s < n_samples; ++s) {
    for (Eigen::Index i = 0; i < m; ++i) z(i, s) = standard_normal(rng);
  }
  Eigen::MatrixXd out = mean.transpose().replicate(n_samples, 1);
  if (constant_) return out;

  // Factor in standardized units so the jitter schedule is scale-free.
  const double std2 = target_std_ * target_std_;
  Eigen::MatrixXd cov = posterior_covariance(points) / std2;
  if (cov.diagonal().maxCoeff() <= 0.0) return out;
  const Eigen::MatrixXd chol = cholesky_with_jitter(cov);
  out += (chol * z).transpose() * target_std_;
  return out;
}

}  // namespace othpo
