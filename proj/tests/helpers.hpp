#pragma once

// Shared test utilities: reproducible random problem instances.

#include <Eigen/Dense>

#include "riskparity/rng.hpp"
#include "riskparity/types.hpp"

namespace rptest {

// Single-factor covariance with idiosyncratic noise: correlations are
// f_i * f_j with loadings in (0, 1), so the matrix is positive definite by
// construction and resembles an equity covariance in scale.
inline Eigen::MatrixXd random_spd(int n, riskparity::Rng& rng) {
  Eigen::VectorXd vol(n), loading(n);
  for (int i = 0; i < n; ++i) {
    vol[i] = riskparity::uniform_range(rng, 0.008, 0.025);
    loading[i] = riskparity::uniform_range(rng, 0.35, 0.85);
  }
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double corr = i == j ? 1.0 : loading[i] * loading[j];
      c(i, j) = c(j, i) = vol[i] * vol[j] * corr;
    }
  }
  return c;
}

inline riskparity::CovarianceMatrix random_cov(int n, riskparity::Rng& rng) {
  return riskparity::CovarianceMatrix(random_spd(n, rng));
}

}  // namespace rptest
