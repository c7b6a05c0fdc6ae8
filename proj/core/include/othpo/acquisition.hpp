#pragma once

#include <span>

#include <Eigen/Core>

#include "othpo/gaussian_process.hpp"
#include "othpo/rng.hpp"
#include "othpo/space.hpp"

namespace othpo {

struct AcquisitionSettings {
  int mc_samples = 256;
  int candidate_pool_size = 1000;
  int local_search_steps = 20;
  double local_search_step = 0.05;
};

// Minimization convention throughout: `incumbent` is the lowest objective
// observed so far.
struct AcquisitionState {
  double incumbent = 0.0;
  AcquisitionSettings settings;
};

// Antithetic standard-normal draws: the first half is sampled, the second
// half is its negation; an odd count appends one unpaired draw.
Eigen::VectorXd antithetic_normals(int n, Rng& rng);

// (1/S) sum_s max(0, incumbent - (mean + stddev * z_s)).
double mc_expected_improvement(double mean, double stddev, double incumbent,
                               const Eigen::VectorXd& normals);

// Closed-form expected improvement, for reference and tests.
double analytic_expected_improvement(double mean, double stddev,
                                     double incumbent);

double mc_ei(const GPModel& model, const Eigen::VectorXd& point,
             const AcquisitionState& state, Rng& rng);

// Unit-cube box; coordinates with lower == upper are held fixed.
struct UnitBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static UnitBox full(Eigen::Index dim) {
    return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
  }
  bool contains(const Eigen::VectorXd& point) const;
  // Uniform within the box; draws only for free coordinates.
  Eigen::VectorXd sample(Rng& rng) const;
};

// Maximizes MC-EI within `box`: a uniform candidate pool scored with common
// random numbers, then coordinate-wise local search from the best candidate.
// If every candidate scores zero, returns a uniform sample from the box.
Eigen::VectorXd propose_point(const GPModel& model, const UnitBox& box,
                              const AcquisitionState& state, Rng& rng);

Configuration propose(const GPModel& model, const SearchSpace& space,
                      const AcquisitionState& state, Rng& rng);

}  // namespace othpo
