#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "riskparity/types.hpp"

namespace riskparity {

// Sign pattern selecting one orthant: signs[i] is +1 or -1.
struct OrthantSignature {
  std::vector<int> signs;

  int size() const { return static_cast<int>(signs.size()); }

  // Parses strings like "+-+". Anything but '+' and '-' is rejected.
  static OrthantSignature parse(const std::string& text);
  std::string str() const;
};

// Solution of the logarithmic-barrier problem restricted to one orthant.
struct OrthantSolution {
  OrthantSignature beta;
  Eigen::VectorXd raw;          // stationary point, unnormalized
  bool normalizable = false;    // true when sum(raw) > 1e-8
  Eigen::VectorXd normalized;   // raw / sum(raw); empty when not normalizable
  double barrier_constant = 1.0;
};

// Solves min x' C x - c * sum_i ln(x_i) over x > 0 by cyclic coordinate
// descent: with b_i = sum_{j != i} C_ij x_j each coordinate update is the
// positive root of 2 C_ii x^2 + 2 b_i x - c = 0,
//   x_i <- (-b_i + sqrt(b_i^2 + 2 C_ii c)) / (2 C_ii).
// The solution satisfies x_i (Cx)_i = c/2 for every asset: every total risk
// contribution is equal, so the normalized vector is the long-only
// equal-risk-contribution portfolio regardless of c. Requires a positive
// definite matrix and c > 0; throws infeasible_error when the sweep fails to
// move less than tol within max_iter sweeps.
Eigen::VectorXd solve_longonly_barrier(const CovarianceMatrix& cov,
                                       double c = 1.0, double tol = 1e-12,
                                       int max_iter = 10000);

// Same problem restricted to the orthant given by beta: substitute
// x = D x^ with D = diag(beta), solve the long-only problem for the
// flipped matrix C^_ij = beta_i beta_j C_ij (computed elementwise so that
// mirrored orthants agree to the last bit), and map back via raw = D x^.
OrthantSolution solve_orthant(const CovarianceMatrix& cov,
                              const OrthantSignature& beta, double c = 1.0,
                              double tol = 1e-12, int max_iter = 10000);

// All 2^n orthants, in binary counting order with asset 0 as the most
// significant digit and '+' before '-' (so "++..+" is first). Cost doubles
// per asset; above n_limit assets the call refuses with guard_error.
std::vector<OrthantSolution> enumerate_orthants(const CovarianceMatrix& cov,
                                                double c = 1.0,
                                                int n_limit = 20);

// Euclidean projection onto the probability simplex
// { x : x >= 0, sum(x) = 1 } (sort-based exact algorithm).
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

// Long-only minimum variance portfolio: projected gradient descent on
// x' C x over the simplex with fixed step 1 / (2 lambda_max), lambda_max
// estimated by power iteration. Requires positive definite input.
Eigen::VectorXd mvp_solve(const CovarianceMatrix& cov, double tol = 1e-10,
                          int max_iter = 50000);

// The 1/n portfolio.
Eigen::VectorXd equal_weight(int n);

}  // namespace riskparity
