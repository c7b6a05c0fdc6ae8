#pragma once

#include <functional>

#include <Eigen/Core>

namespace othpo {

struct LbfgsOptions {
  int max_iterations = 100;
  int memory = 8;
  // Converged once the projected gradient's infinity norm drops below this.
  double gradient_tolerance = 1e-7;
  double relative_function_tolerance = 1e-13;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Returns f(x) and writes the gradient. A non-finite value marks x as
// infeasible; the line search backs off from it.
using GradientObjective =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

// Projected L-BFGS minimization inside the box [lower, upper]. Variables
// pinned at a bound with an outward-pointing gradient are frozen for the
// step; the curvature memory is dropped whenever the active set changes.
LbfgsResult minimize_lbfgs_box(const GradientObjective& objective,
                               Eigen::VectorXd x0,
                               const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper,
                               const LbfgsOptions& options = {});

}  // namespace othpo
