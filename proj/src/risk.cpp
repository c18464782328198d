#include "riskparity/risk.hpp"

#include <cmath>
#include <limits>

namespace riskparity {

namespace {

void check_dims(const Eigen::VectorXd& x, const CovarianceMatrix& cov) {
  if (x.size() != cov.size()) {
    throw std::invalid_argument("portfolio length does not match covariance size");
  }
}

}  // namespace

FitnessKind fitness_kind_from_string(const std::string& text) {
  if (text == "marginal") return FitnessKind::marginal;
  if (text == "total") return FitnessKind::total;
  throw std::invalid_argument("unknown fitness kind '" + text +
                              "' (expected 'marginal' or 'total')");
}

const char* to_string(FitnessKind kind) {
  return kind == FitnessKind::marginal ? "marginal" : "total";
}

double portfolio_risk(const Eigen::VectorXd& x, const CovarianceMatrix& cov) {
  check_dims(x, cov);
  const double q = x.dot(cov.matrix() * x);
  if (q < -1e-12) {
    throw std::invalid_argument("negative portfolio variance: covariance is not PSD");
  }
  return std::sqrt(std::max(q, 0.0));
}

Eigen::VectorXd marginal_contributions(const Eigen::VectorXd& x,
                                       const CovarianceMatrix& cov) {
  const double sigma = portfolio_risk(x, cov);
  if (sigma == 0.0) {
    throw std::domain_error("degenerate portfolio: sigma is zero");
  }
  return (cov.matrix() * x) / sigma;
}

Eigen::VectorXd total_contributions(const Eigen::VectorXd& x,
                                    const CovarianceMatrix& cov) {
  check_dims(x, cov);
  return x.cwiseProduct(cov.matrix() * x);
}

Eigen::VectorXd normalized_contributions(const Eigen::VectorXd& x,
                                         const CovarianceMatrix& cov) {
  const Eigen::VectorXd mc = marginal_contributions(x, cov);
  return mc / mc.sum();
}

double fitness_marginal(const Eigen::VectorXd& x, const CovarianceMatrix& cov) {
  const Eigen::VectorXd mc = marginal_contributions(x, cov);
  const double mean = mc.mean();
  return (mc.array() - mean).square().sum();
}

double fitness_total(const Eigen::VectorXd& x, const CovarianceMatrix& cov) {
  const Eigen::VectorXd tc = total_contributions(x, cov);
  const double mean = tc.mean();
  // sum_{i,j} (tc_i - tc_j)^2 collapses to 2n * sum_i (tc_i - mean)^2.
  return 2.0 * static_cast<double>(tc.size()) *
         (tc.array() - mean).square().sum();
}

double evaluate_fitness(const Eigen::VectorXd& x, const CovarianceMatrix& cov,
                        FitnessKind kind) {
  return kind == FitnessKind::marginal ? fitness_marginal(x, cov)
                                       : fitness_total(x, cov);
}

double fitness_or_infinity(const Eigen::VectorXd& x,
                           const CovarianceMatrix& cov, FitnessKind kind) {
  try {
    return evaluate_fitness(x, cov, kind);
  } catch (const std::domain_error&) {
    return std::numeric_limits<double>::infinity();
  }
}

std::optional<Eigen::VectorXd> repair_normalize(const Eigen::VectorXd& w,
                                                const Bounds& bounds) {
  if (w.size() != bounds.size() || !w.allFinite()) return std::nullopt;
  double s = w.sum();
  if (std::abs(s) <= 1e-8) return std::nullopt;
  Eigen::VectorXd x = w / s;
  for (int round = 0; round < 100; ++round) {
    if (bounds.contains(x, 1e-9) && std::abs(x.sum() - 1.0) <= 1e-9) {
      return x;
    }
    x = x.cwiseMax(bounds.lower).cwiseMin(bounds.upper);
    s = x.sum();
    if (std::abs(s) <= 1e-8) return std::nullopt;
    x /= s;
  }
  return std::nullopt;
}

RiskReport risk_report(const Eigen::VectorXd& x, const CovarianceMatrix& cov) {
  RiskReport r;
  r.sigma = portfolio_risk(x, cov);
  r.marginal = marginal_contributions(x, cov);
  r.total = total_contributions(x, cov);
  r.normalized = r.marginal / r.marginal.sum();
  r.fitness_marginal = fitness_marginal(x, cov);
  r.fitness_total = fitness_total(x, cov);
  return r;
}

}  // namespace riskparity
