#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "riskparity/risk.hpp"
#include "riskparity/types.hpp"

namespace riskparity {

// Coordinate-wise local descent. Each phase uses one step size from
// `epsilons` (strictly decreasing, coarse to fine) for up to max_steps
// best-improvement moves.
struct LsConfig {
  std::vector<double> epsilons{0.01, 0.001};
  int max_steps = 500;  // per phase
  double improvement_tolerance = 1e-12;
  Bounds bounds;
  FitnessKind fitness_kind = FitnessKind::marginal;

  void validate() const;
};

struct LsResult {
  Eigen::VectorXd portfolio;
  double fitness = 0.0;
  std::vector<int> steps_per_phase;
};

// All repaired single-coordinate perturbations of x: for each asset, x_i + eps
// and x_i - eps, clipped to the box before repair. Candidates whose repair
// fails are dropped, so the result holds at most 2n portfolios, in scan order
// (asset 0 up, asset 0 down, asset 1 up, ...).
std::vector<Eigen::VectorXd> neighborhood(const Eigen::VectorXd& x, double eps,
                                          const Bounds& bounds);

// One best-improvement move: returns the neighbor with the lowest fitness
// if it beats fitness(x) - tol, otherwise std::nullopt. Ties keep the
// earliest candidate in scan order.
std::optional<Eigen::VectorXd> local_search_step(const Eigen::VectorXd& x,
                                                 const CovarianceMatrix& cov,
                                                 double eps,
                                                 const Bounds& bounds,
                                                 FitnessKind kind, double tol);

// Runs every phase in order, starting each from the previous phase's result.
// The start portfolio must already be feasible. steps_per_phase records how
// many moves each phase actually made.
LsResult run_local_search(const Eigen::VectorXd& start,
                          const CovarianceMatrix& cov, const LsConfig& cfg);

}  // namespace riskparity
