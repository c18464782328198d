#include "riskparity/local_search.hpp"

#include <algorithm>
#include <cmath>

namespace riskparity {

void LsConfig::validate() const {
  bounds.validate();
  if (epsilons.empty()) {
    throw std::invalid_argument("local search needs at least one step size");
  }
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) {
      throw std::invalid_argument("step sizes must be strictly positive");
    }
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw std::invalid_argument("step sizes must be strictly decreasing");
    }
  }
  if (max_steps < 1) {
    throw std::invalid_argument("max_steps must be at least 1");
  }
  if (improvement_tolerance < 0.0) {
    throw std::invalid_argument("improvement_tolerance must be non-negative");
  }
}

std::vector<Eigen::VectorXd> neighborhood(const Eigen::VectorXd& x, double eps,
                                          const Bounds& bounds) {
  const int n = static_cast<int>(x.size());
  std::vector<Eigen::VectorXd> out;
  out.reserve(2 * n);
  Eigen::VectorXd cand = x;
  for (int i = 0; i < n; ++i) {
    for (double delta : {eps, -eps}) {
      cand[i] = std::clamp(x[i] + delta, bounds.lower[i], bounds.upper[i]);
      if (auto repaired = repair_normalize(cand, bounds)) {
        out.push_back(std::move(*repaired));
      }
    }
    cand[i] = x[i];
  }
  return out;
}

std::optional<Eigen::VectorXd> local_search_step(const Eigen::VectorXd& x,
                                                 const CovarianceMatrix& cov,
                                                 double eps,
                                                 const Bounds& bounds,
                                                 FitnessKind kind, double tol) {
  const double current = fitness_or_infinity(x, cov, kind);
  std::optional<Eigen::VectorXd> best;
  double best_fitness = current - tol;
  for (auto& cand : neighborhood(x, eps, bounds)) {
    const double f = fitness_or_infinity(cand, cov, kind);
    if (f < best_fitness) {  // strict: ties keep the earliest candidate
      best_fitness = f;
      best = std::move(cand);
    }
  }
  return best;
}

LsResult run_local_search(const Eigen::VectorXd& start,
                          const CovarianceMatrix& cov, const LsConfig& cfg) {
  cfg.validate();
  if (start.size() != cov.size() || cfg.bounds.size() != cov.size()) {
    throw std::invalid_argument("portfolio, covariance and bounds sizes disagree");
  }
  if (!cfg.bounds.contains(start, 1e-9) || std::abs(start.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("local search start must be feasible");
  }

  LsResult result;
  result.portfolio = start;
  result.steps_per_phase.reserve(cfg.epsilons.size());
  for (double eps : cfg.epsilons) {
    int steps = 0;
    while (steps < cfg.max_steps) {
      auto next = local_search_step(result.portfolio, cov, eps, cfg.bounds,
                                    cfg.fitness_kind,
                                    cfg.improvement_tolerance);
      if (!next) break;
      result.portfolio = std::move(*next);
      ++steps;
    }
    result.steps_per_phase.push_back(steps);
  }
  result.fitness = fitness_or_infinity(result.portfolio, cov, cfg.fitness_kind);
  return result;
}

}  // namespace riskparity
