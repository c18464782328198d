#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace riskparity {

// Unreadable or malformed input data. The CLI maps this to exit code 2.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The optimization problem itself is infeasible or degenerate (empty feasible
// set, singular covariance where positive definiteness is required, a solver
// that failed to converge). The CLI maps this to exit code 1.
class infeasible_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A request was refused by a safety guard (e.g. orthant enumeration above the
// asset-count limit). The CLI maps this to exit code 3.
class guard_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ordered set of asset identifiers. Order is meaningful: it fixes the row and
// column layout of every vector and matrix in the library.
struct AssetUniverse {
  std::vector<std::string> tickers;

  int size() const { return static_cast<int>(tickers.size()); }

  // Requires at least two assets and unique, non-empty tickers.
  void validate() const;
};

// Symmetric positive semi-definite covariance matrix, validated on
// construction:
//   - square, all entries finite
//   - symmetric within 1e-12 relative to the largest absolute entry
//   - strictly positive diagonal
//   - smallest eigenvalue >= -1e-10 * largest eigenvalue
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(Eigen::MatrixXd entries);

  int size() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  double min_eigenvalue() const { return eig_min_; }
  double max_eigenvalue() const { return eig_max_; }

  // True when the matrix is numerically positive definite, i.e. the smallest
  // eigenvalue clears 1e-12 * largest eigenvalue. Solvers that need full rank
  // (barrier, minimum variance) check this; the evolutionary path does not.
  bool is_positive_definite() const;

 private:
  Eigen::MatrixXd m_;
  double eig_min_ = 0.0;
  double eig_max_ = 0.0;
};

// Per-asset box constraints a_i <= x_i <= b_i on portfolio weights.
struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int size() const { return static_cast<int>(lower.size()); }

  static Bounds uniform(int n, double lo, double hi);

  // Requires lower[i] < upper[i] for every asset and a budget-compatible box:
  // sum(lower) <= 1 <= sum(upper), otherwise no fully-invested portfolio fits.
  void validate() const;

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
};

}  // namespace riskparity
