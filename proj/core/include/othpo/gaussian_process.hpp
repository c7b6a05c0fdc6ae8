#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "othpo/rng.hpp"

namespace othpo {

// Rows of an input matrix are points in the unit cube.
using PointMatrix = Eigen::MatrixXd;

struct KernelParams {
  double signal_variance = 1.0;
  Eigen::VectorXd lengthscales;
  double noise_variance = 1e-3;
};

// Per-dimension Kumaraswamy CDF warping, w(x) = 1 - (1 - x^a)^b.
struct WarpParams {
  Eigen::VectorXd a;
  Eigen::VectorXd b;

  static WarpParams identity(Eigen::Index dim) {
    return {Eigen::VectorXd::Ones(dim), Eigen::VectorXd::Ones(dim)};
  }
};

// Matérn 5/2 with ARD lengthscales, evaluated on already-warped inputs.
double matern52(const Eigen::Ref<const Eigen::VectorXd>& x1,
                const Eigen::Ref<const Eigen::VectorXd>& x2,
                const KernelParams& params);

double kumaraswamy_cdf(double x, double a, double b);
Eigen::VectorXd warp(const Eigen::Ref<const Eigen::VectorXd>& point,
                     const WarpParams& params);
PointMatrix warp_rows(const PointMatrix& points, const WarpParams& params);

// Kernel and warping parameters flattened in log space:
//   [log signal, log noise, log lengthscale_1..d, log a_1..d, log b_1..d].
struct HyperParameters {
  KernelParams kernel;
  WarpParams warping;

  static HyperParameters defaults(Eigen::Index dim);
  static HyperParameters from_log_vector(const Eigen::VectorXd& theta);
  Eigen::VectorXd to_log_vector() const;
  Eigen::Index dim() const { return kernel.lengthscales.size(); }
};

// Standard deviation of the log-normal prior on each warping parameter.
inline constexpr double kWarpPriorStddev = 0.75;

struct LikelihoodValue {
  double value = 0.0;
  // d value / d log-parameter, same layout as HyperParameters::to_log_vector.
  Eigen::VectorXd gradient;
};

// Log marginal likelihood of targets under a zero-mean GP and its analytic
// gradient. Throws NumericError if K + noise I is not positive definite
// after jitter escalation.
LikelihoodValue log_marginal_likelihood(const HyperParameters& params,
                                        const PointMatrix& inputs,
                                        const Eigen::VectorXd& targets);

// log_marginal_likelihood plus the log-normal warping prior. This is the
// objective fit() maximizes.
LikelihoodValue log_posterior_objective(const HyperParameters& params,
                                        const PointMatrix& inputs,
                                        const Eigen::VectorXd& targets);

struct GPFitOptions {
  int restarts = 5;
  int max_iterations = 100;
};

struct Prediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

// Fitted GP posterior. Targets are stored standardized; predictions are in
// native target units. Immutable once built.
class GPModel {
 public:
  // Maximizes the log posterior over hyperparameters. Input columns without
  // spread keep their default parameters since the kernel ignores them.
  static GPModel fit(const PointMatrix& inputs, const Eigen::VectorXd& targets,
                     const GPFitOptions& options, Rng& rng);

  // Posterior under fixed hyperparameters.
  static GPModel condition(const PointMatrix& inputs,
                           const Eigen::VectorXd& targets,
                           const HyperParameters& params);

  Prediction predict(const PointMatrix& points) const;
  // Joint posterior covariance of the latent function, native units.
  Eigen::MatrixXd posterior_covariance(const PointMatrix& points) const;
  // n_samples x points.rows() joint draws of the latent function.
  Eigen::MatrixXd sample_posterior(const PointMatrix& points,
                                   Eigen::Index n_samples, Rng& rng) const;

  const PointMatrix& train_inputs() const { return inputs_; }
  const Eigen::VectorXd& train_targets() const { return targets_; }
  const HyperParameters& params() const { return params_; }
  const Eigen::MatrixXd& cholesky_factor() const { return chol_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double target_mean() const { return target_mean_; }
  double target_std() const { return target_std_; }
  double jitter() const { return jitter_; }
  double log_objective() const { return log_objective_; }
  // Degenerate model for constant (or single) targets: the predictive mean
  // is that constant and the variance is zero.
  bool is_constant() const { return constant_; }
  Eigen::Index dim() const { return inputs_.cols(); }

 private:
  void factorize();
  Eigen::MatrixXd cross_kernel(const PointMatrix& warped_points) const;

  PointMatrix inputs_;
  PointMatrix warped_;
  Eigen::VectorXd targets_;  // standardized
  HyperParameters params_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  double target_mean_ = 0.0;
  double target_std_ = 1.0;
  double jitter_ = 0.0;
  double log_objective_ = 0.0;
  bool constant_ = false;
};

// Lower Cholesky factor of `matrix` with diagonal jitter escalated x10 from
// 1e-8 to 1e-4 on failure. Writes the jitter used. Throws NumericError.
Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& matrix,
                                     double* jitter_used = nullptr);

}  // namespace othpo
