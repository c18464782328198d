#include "riskparity/convex_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskparity {

namespace {

void require_positive_definite(const CovarianceMatrix& cov,
                               const char* solver) {
  if (!cov.is_positive_definite()) {
    throw infeasible_error(std::string(solver) +
                           " requires a positive definite covariance matrix");
  }
}

// Largest eigenvalue estimate by power iteration; floored by the largest
// diagonal entry, which never exceeds lambda_max for a PSD matrix.
double estimate_lambda_max(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  double lambda = 0.0;
  for (int iter = 0; iter < 5000; ++iter) {
    Eigen::VectorXd w = m * v;
    const double norm = w.norm();
    if (norm == 0.0) break;
    v = w / norm;
    if (std::abs(norm - lambda) <= 1e-14 * norm) {
      lambda = norm;
      break;
    }
    lambda = norm;
  }
  return std::max(lambda, m.diagonal().maxCoeff());
}

}  // namespace

OrthantSignature OrthantSignature::parse(const std::string& text) {
  if (text.empty()) {
    throw std::invalid_argument("orthant signature must not be empty");
  }
  OrthantSignature sig;
  sig.signs.reserve(text.size());
  for (char ch : text) {
    if (ch == '+') {
      sig.signs.push_back(1);
    } else if (ch == '-') {
      sig.signs.push_back(-1);
    } else {
      throw std::invalid_argument(
          "orthant signature may only contain '+' and '-'");
    }
  }
  return sig;
}

std::string OrthantSignature::str() const {
  std::string s;
  s.reserve(signs.size());
  for (int b : signs) s.push_back(b > 0 ? '+' : '-');
  return s;
}

Eigen::VectorXd solve_longonly_barrier(const CovarianceMatrix& cov, double c,
                                       double tol, int max_iter) {
  if (!(c > 0.0)) {
    throw std::invalid_argument("barrier constant must be positive");
  }
  require_positive_definite(cov, "barrier solver");
  const Eigen::MatrixXd& m = cov.matrix();
  const int n = cov.size();

  // Exact solution for a diagonal matrix; a sound interior start otherwise.
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = std::sqrt(c / (2.0 * m(i, i)));

  for (int sweep = 0; sweep < max_iter; ++sweep) {
    double max_change = 0.0;
    for (int i = 0; i < n; ++i) {
      const double b = m.row(i).dot(x) - m(i, i) * x[i];
      const double xi = (-b + std::sqrt(b * b + 2.0 * m(i, i) * c)) /
                        (2.0 * m(i, i));
      max_change = std::max(max_change, std::abs(xi - x[i]));
      x[i] = xi;
    }
    if (max_change < tol) return x;
  }
  throw infeasible_error("barrier solver did not converge");
}

OrthantSolution solve_orthant(const CovarianceMatrix& cov,
                              const OrthantSignature& beta, double c,
                              double tol, int max_iter) {
  const int n = cov.size();
  if (beta.size() != n) {
    throw std::invalid_argument("orthant signature length does not match covariance size");
  }
  // Flip signs elementwise rather than via matrix products, so mirrored
  // orthants solve bit-identical problems.
  Eigen::MatrixXd flipped(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      flipped(i, j) = beta.signs[i] * beta.signs[j] * cov(i, j);
    }
  }
  const Eigen::VectorXd positive = solve_longonly_barrier(
      CovarianceMatrix(std::move(flipped)), c, tol, max_iter);

  OrthantSolution sol;
  sol.beta = beta;
  sol.barrier_constant = c;
  sol.raw.resize(n);
  for (int i = 0; i < n; ++i) sol.raw[i] = beta.signs[i] * positive[i];
  const double sum = sol.raw.sum();
  // A non-positive sum cannot be rescaled to budget 1 without leaving the
  // orthant, so such stationary points stay unnormalized.
  sol.normalizable = sum > 1e-8;
  if (sol.normalizable) sol.normalized = sol.raw / sum;
  return sol;
}

std::vector<OrthantSolution> enumerate_orthants(const CovarianceMatrix& cov,
                                                double c, int n_limit) {
  const int n = cov.size();
  if (n > n_limit) {
    throw guard_error("orthant enumeration over " + std::to_string(n) +
                      " assets exceeds the limit of " +
                      std::to_string(n_limit) + " (2^n solves)");
  }
  std::vector<OrthantSolution> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    OrthantSignature beta;
    beta.signs.resize(n);
    // Asset 0 is the most significant digit, '+' sorts before '-', so the
    // all-positive orthant comes first and signatures run in string order.
    for (int i = 0; i < n; ++i) {
      beta.signs[i] = ((mask >> (n - 1 - i)) & 1) ? -1 : 1;
    }
    out.push_back(solve_orthant(cov, beta, c));
  }
  return out;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  if (n == 0) {
    throw std::invalid_argument("cannot project an empty vector");
  }
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  int rho = 0;
  for (int k = 0; k < n; ++k) {
    cumulative += u[k];
    const double candidate = (cumulative - 1.0) / (k + 1);
    if (u[k] - candidate > 0.0) {
      rho = k + 1;
      theta = candidate;
    }
  }
  (void)rho;
  return (v.array() - theta).max(0.0);
}

Eigen::VectorXd mvp_solve(const CovarianceMatrix& cov, double tol,
                          int max_iter) {
  require_positive_definite(cov, "minimum variance solver");
  const Eigen::MatrixXd& m = cov.matrix();
  const double step = 1.0 / (2.0 * estimate_lambda_max(m));

  Eigen::VectorXd x = equal_weight(cov.size());
  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXd next = project_to_simplex(x - step * (2.0 * m * x));
    const double change = (next - x).cwiseAbs().maxCoeff();
    x = next;
    if (change < tol) return x;
  }
  throw infeasible_error("minimum variance solver did not converge");
}

Eigen::VectorXd equal_weight(int n) {
  if (n < 1) {
    throw std::invalid_argument("equal weighting needs at least one asset");
  }
  return Eigen::VectorXd::Constant(n, 1.0 / n);
}

}  // namespace riskparity
