#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

#include "riskparity/types.hpp"

namespace riskparity {

// Which dispersion measure drives an optimization run.
//   marginal: sum of squared deviations of the marginal risk contributions
//             (Cx)_i / sigma from their mean.
//   total:    sum over all ordered pairs (i, j) of squared differences of the
//             total contributions x_i (Cx)_i.
// Both vanish exactly when every asset contributes the same share of risk.
enum class FitnessKind { marginal, total };

FitnessKind fitness_kind_from_string(const std::string& text);
const char* to_string(FitnessKind kind);

// Portfolio volatility sigma(x) = sqrt(x' C x). Values within -1e-12 of zero
// are clamped to zero; anything lower signals a non-PSD matrix and throws.
double portfolio_risk(const Eigen::VectorXd& x, const CovarianceMatrix& cov);

// Marginal risk contributions d sigma / d x_i = (Cx)_i / sigma(x).
// Throws std::domain_error when sigma(x) == 0.
Eigen::VectorXd marginal_contributions(const Eigen::VectorXd& x,
                                       const CovarianceMatrix& cov);

// Total risk contributions x_i (Cx)_i. Their sum is sigma^2.
Eigen::VectorXd total_contributions(const Eigen::VectorXd& x,
                                    const CovarianceMatrix& cov);

// Marginal contributions rescaled to sum to one. By Euler's theorem these
// equal x_i (Cx)_i / sigma^2, each asset's share of total risk.
Eigen::VectorXd normalized_contributions(const Eigen::VectorXd& x,
                                         const CovarianceMatrix& cov);

// Dispersion of the marginal contributions around their mean.
double fitness_marginal(const Eigen::VectorXd& x, const CovarianceMatrix& cov);

// Pairwise squared differences of the total contributions, computed as
// 2n * sum_i (tc_i - mean(tc))^2 which is algebraically identical.
double fitness_total(const Eigen::VectorXd& x, const CovarianceMatrix& cov);

double evaluate_fitness(const Eigen::VectorXd& x, const CovarianceMatrix& cov,
                        FitnessKind kind);

// evaluate_fitness that reports degenerate portfolios (sigma == 0 under the
// marginal measure) as +infinity instead of throwing. Search code uses this
// so that a pathological candidate loses every comparison but aborts nothing.
double fitness_or_infinity(const Eigen::VectorXd& x,
                           const CovarianceMatrix& cov, FitnessKind kind);

// Projects an arbitrary weight vector onto the feasible set
// { x : sum(x) = 1, lower <= x <= upper }:
//   1. divide by the coordinate sum (rejects |sum| <= 1e-8),
//   2. alternate clamping into the box and renormalizing, at most 100 rounds,
//      until the box holds within 1e-9 per coordinate and |sum - 1| <= 1e-9.
// Returns std::nullopt when the input cannot be repaired; callers treat such
// candidates as having +infinity fitness.
std::optional<Eigen::VectorXd> repair_normalize(const Eigen::VectorXd& w,
                                                const Bounds& bounds);

// Everything a caller typically wants to know about one portfolio.
struct RiskReport {
  double sigma = 0.0;
  Eigen::VectorXd marginal;
  Eigen::VectorXd total;
  Eigen::VectorXd normalized;
  double fitness_marginal = 0.0;
  double fitness_total = 0.0;
};

RiskReport risk_report(const Eigen::VectorXd& x, const CovarianceMatrix& cov);

}  // namespace riskparity
