#include "riskparity/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <unordered_set>

namespace riskparity {

void AssetUniverse::validate() const {
  if (tickers.size() < 2) {
    throw std::invalid_argument("asset universe needs at least two tickers");
  }
  std::unordered_set<std::string> seen;
  for (const auto& t : tickers) {
    if (t.empty()) {
      throw std::invalid_argument("asset universe contains an empty ticker");
    }
    if (!seen.insert(t).second) {
      throw std::invalid_argument("duplicate ticker '" + t + "'");
    }
  }
}

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd entries)
    : m_(std::move(entries)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw std::invalid_argument("covariance matrix must be square and non-empty");
  }
  if (!m_.allFinite()) {
    throw std::invalid_argument("covariance matrix contains non-finite entries");
  }
  const double scale = m_.cwiseAbs().maxCoeff();
  const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw std::invalid_argument("covariance matrix is not symmetric");
  }
  if (m_.diagonal().minCoeff() <= 0.0) {
    throw std::invalid_argument("covariance matrix needs a strictly positive diagonal");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
  eig_min_ = es.eigenvalues().minCoeff();
  eig_max_ = es.eigenvalues().maxCoeff();
  if (eig_min_ < -1e-10 * eig_max_) {
    throw std::invalid_argument("covariance matrix is not positive semi-definite");
  }
}

bool CovarianceMatrix::is_positive_definite() const {
  return eig_min_ > 1e-12 * eig_max_;
}

Bounds Bounds::uniform(int n, double lo, double hi) {
  Bounds b;
  b.lower = Eigen::VectorXd::Constant(n, lo);
  b.upper = Eigen::VectorXd::Constant(n, hi);
  return b;
}

void Bounds::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw std::invalid_argument("bounds vectors must be non-empty and equally sized");
  }
  if (!lower.allFinite() || !upper.allFinite()) {
    throw std::invalid_argument("bounds must be finite");
  }
  for (int i = 0; i < size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw std::invalid_argument("each lower bound must be strictly below its upper bound");
    }
  }
  if (lower.sum() > 1.0 || upper.sum() < 1.0) {
    throw infeasible_error(
        "bounds admit no fully invested portfolio: need sum(lower) <= 1 <= sum(upper)");
  }
}

bool Bounds::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lower.size()) return false;
  return (x - lower).minCoeff() >= -tol && (upper - x).minCoeff() >= -tol;
}

}  // namespace riskparity
