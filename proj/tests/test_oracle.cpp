#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "helpers.hpp"
#include "riskparity/convex_oracle.hpp"
#include "riskparity/risk.hpp"

using namespace riskparity;

namespace {

CovarianceMatrix two_asset() {
  Eigen::MatrixXd m(2, 2);
  m << 0.04, 0.01, 0.01, 0.09;
  return CovarianceMatrix(m);
}

double stationarity_residual(const Eigen::VectorXd& x,
                             const CovarianceMatrix& cov, double c) {
  const Eigen::VectorXd cx = cov.matrix() * x;
  double worst = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    worst = std::max(worst, std::abs(x[i] * cx[i] - c / 2.0));
  }
  return worst;
}

}  // namespace

TEST_CASE("orthant signatures parse and print") {
  const OrthantSignature sig = OrthantSignature::parse("+-+");
  CHECK(sig.signs == std::vector<int>{1, -1, 1});
  CHECK(sig.str() == "+-+");
  CHECK_THROWS_AS(OrthantSignature::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(OrthantSignature::parse("+0-"), std::invalid_argument);
}

TEST_CASE("simplex projection") {
  const Eigen::Vector3d v(0.9, 0.6, 0.1);
  const Eigen::VectorXd p = project_to_simplex(v);
  CHECK(p[0] == doctest::Approx(0.65).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.35).epsilon(1e-14));
  CHECK(p[2] == 0.0);

  // Points already on the simplex stay put.
  const Eigen::Vector3d s(0.2, 0.5, 0.3);
  CHECK((project_to_simplex(s) - s).cwiseAbs().maxCoeff() < 1e-14);

  // Output is always a distribution.
  Rng rng(10);
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd x(4);
    for (int i = 0; i < 4; ++i) x[i] = uniform_range(rng, -2.0, 2.0);
    const Eigen::VectorXd q = project_to_simplex(x);
    CHECK(q.minCoeff() >= 0.0);
    CHECK(q.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("barrier solution on diagonal matrices is closed-form") {
  // Identity: every coordinate solves 2x^2 = c, so x_i = sqrt(1/2).
  const CovarianceMatrix id(Eigen::MatrixXd::Identity(2, 2));
  const Eigen::VectorXd x = solve_longonly_barrier(id);
  CHECK(x[0] == doctest::Approx(0.7071067811865476).epsilon(1e-10));
  CHECK(x[1] == doctest::Approx(0.7071067811865476).epsilon(1e-10));

  Eigen::MatrixXd d(2, 2);
  d << 0.04, 0.0, 0.0, 0.09;
  const Eigen::VectorXd y = solve_longonly_barrier(CovarianceMatrix(d));
  // x_i = sqrt(c / (2 sigma_i^2)) = 1 / (sigma_i sqrt(2)).
  CHECK(y[0] == doctest::Approx(3.5355339059327378).epsilon(1e-8));
  CHECK(y[1] == doctest::Approx(2.3570226039551585).epsilon(1e-8));
  // Normalized, that is the inverse-volatility split 0.6 / 0.4.
  const Eigen::VectorXd n = y / y.sum();
  CHECK(n[0] == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(n[1] == doctest::Approx(0.4).epsilon(1e-10));
}

TEST_CASE("barrier stationarity holds on random instances") {
  Rng rng(6);
  for (int n : {2, 3, 5, 8}) {
    const CovarianceMatrix cov = rptest::random_cov(n, rng);
    for (double c : {0.1, 1.0, 10.0}) {
      const Eigen::VectorXd x = solve_longonly_barrier(cov, c);
      CHECK(x.minCoeff() > 0.0);
      CHECK(stationarity_residual(x, cov, c) < 1e-8 * std::max(1.0, c));
    }
  }
}

TEST_CASE("barrier constant only rescales the solution") {
  Rng rng(15);
  const CovarianceMatrix cov = rptest::random_cov(5, rng);
  const Eigen::VectorXd a = solve_longonly_barrier(cov, 0.1);
  const Eigen::VectorXd b = solve_longonly_barrier(cov, 1.0);
  const Eigen::VectorXd c = solve_longonly_barrier(cov, 10.0);
  CHECK(((a / a.sum()) - (b / b.sum())).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(((c / c.sum()) - (b / b.sum())).cwiseAbs().maxCoeff() < 1e-8);

  // The normalized barrier point equalizes total risk contributions.
  CHECK(fitness_total(b / b.sum(), cov) < 1e-16);
}

TEST_CASE("barrier input validation") {
  const CovarianceMatrix cov = two_asset();
  CHECK_THROWS_AS(solve_longonly_barrier(cov, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_longonly_barrier(cov, -1.0), std::invalid_argument);

  Eigen::MatrixXd singular(2, 2);
  singular << 1.0, -1.0, -1.0, 1.0;
  CHECK_THROWS_AS(solve_longonly_barrier(CovarianceMatrix(singular)),
                  infeasible_error);
}

TEST_CASE("orthant solve flips signs consistently") {
  const CovarianceMatrix id(Eigen::MatrixXd::Identity(2, 2));

  const OrthantSolution pp = solve_orthant(id, OrthantSignature::parse("++"));
  REQUIRE(pp.normalizable);
  CHECK(pp.normalized[0] == doctest::Approx(0.5).epsilon(1e-10));

  // Mixed signs on the identity: the raw point is (+r, -r), so the weight
  // sum is zero and no normalization exists.
  const OrthantSolution pm = solve_orthant(id, OrthantSignature::parse("+-"));
  CHECK(pm.raw[0] > 0.0);
  CHECK(pm.raw[1] < 0.0);
  CHECK_FALSE(pm.normalizable);
  CHECK(pm.normalized.size() == 0);

  CHECK_THROWS_AS(solve_orthant(id, OrthantSignature::parse("+++")),
                  std::invalid_argument);
}

TEST_CASE("mirrored orthants produce bit-identical negated solutions") {
  Rng rng(23);
  const CovarianceMatrix cov = rptest::random_cov(4, rng);
  const auto all = enumerate_orthants(cov);
  REQUIRE(all.size() == 16);
  for (std::size_t k = 0; k < all.size(); ++k) {
    const auto& mirror = all[all.size() - 1 - k];  // complement signature
    for (int i = 0; i < 4; ++i) {
      CHECK(all[k].raw[i] == -mirror.raw[i]);
    }
  }
}

TEST_CASE("enumeration order and stationarity of every orthant") {
  Rng rng(11);
  const CovarianceMatrix cov = rptest::random_cov(3, rng);
  const auto all = enumerate_orthants(cov);
  REQUIRE(all.size() == 8);
  const char* expected[] = {"+++", "++-", "+-+", "+--",
                            "-++", "-+-", "--+", "---"};
  for (int k = 0; k < 8; ++k) {
    CHECK(all[k].beta.str() == expected[k]);
    CHECK(stationarity_residual(all[k].raw, cov, 1.0) < 1e-8);
    if (all[k].normalizable) {
      CHECK(all[k].normalized.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK(all[0].normalizable);  // the long-only orthant always normalizes
}

TEST_CASE("enumeration refuses oversized universes") {
  const CovarianceMatrix big(Eigen::MatrixXd::Identity(21, 21));
  CHECK_THROWS_AS(enumerate_orthants(big), guard_error);

  Rng rng(3);
  const CovarianceMatrix small = rptest::random_cov(3, rng);
  CHECK_THROWS_AS(enumerate_orthants(small, 1.0, 2), guard_error);
  CHECK_NOTHROW(enumerate_orthants(small, 1.0, 3));
}

TEST_CASE("minimum variance matches closed forms") {
  const CovarianceMatrix id(Eigen::MatrixXd::Identity(3, 3));
  const Eigen::VectorXd e = mvp_solve(id);
  for (int i = 0; i < 3; ++i) {
    CHECK(e[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
  }

  // Unconstrained optimum (8/11, 3/11) is interior, so the projected
  // solution matches it.
  const Eigen::VectorXd w = mvp_solve(two_asset());
  CHECK(w[0] == doctest::Approx(8.0 / 11.0).epsilon(1e-6));
  CHECK(w[1] == doctest::Approx(3.0 / 11.0).epsilon(1e-6));

  // Diagonal covariances keep the optimum interior (weights scale with
  // inverse variance), so even a huge-variance asset keeps a sliver.
  Eigen::MatrixXd d(2, 2);
  d << 0.0001, 0.0, 0.0, 100.0;
  const Eigen::VectorXd b = mvp_solve(CovarianceMatrix(d));
  CHECK(b[0] == doctest::Approx(10000.0 / 10000.01).epsilon(1e-8));
  CHECK(b[1] == doctest::Approx(0.01 / 10000.01).epsilon(1e-3));

  // High correlation with unequal variances would short the risky asset,
  // so the long-only solution parks it on the boundary exactly.
  Eigen::MatrixXd r(2, 2);
  r << 0.01, 0.027, 0.027, 0.09;
  const Eigen::VectorXd bd = mvp_solve(CovarianceMatrix(r));
  CHECK(bd[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(bd[1] <= 1e-12);
  CHECK(bd[1] >= 0.0);

  Eigen::MatrixXd singular(2, 2);
  singular << 1.0, -1.0, -1.0, 1.0;
  CHECK_THROWS_AS(mvp_solve(CovarianceMatrix(singular)), infeasible_error);
}

TEST_CASE("interior minimum variance equalizes marginal contributions") {
  const Eigen::VectorXd w = mvp_solve(two_asset());
  CHECK(fitness_marginal(w, two_asset()) < 1e-12);
}

TEST_CASE("minimum variance beats a fine grid search") {
  Rng rng(31);
  const CovarianceMatrix cov = rptest::random_cov(3, rng);
  const Eigen::VectorXd w = mvp_solve(cov);

  double best = 1e300;
  Eigen::Vector3d best_x = Eigen::Vector3d::Zero();
  for (int a = 0; a <= 1000; ++a) {
    for (int b = 0; b <= 1000 - a; ++b) {
      const Eigen::Vector3d x(a / 1000.0, b / 1000.0,
                              (1000 - a - b) / 1000.0);
      const double v = x.dot(cov.matrix() * x);
      if (v < best) {
        best = v;
        best_x = x;
      }
    }
  }
  CHECK((w - best_x).cwiseAbs().maxCoeff() < 2e-3);
  CHECK(w.dot(cov.matrix() * w) <= best + 1e-12);
}

TEST_CASE("equal weighting") {
  const Eigen::VectorXd w = equal_weight(4);
  for (int i = 0; i < 4; ++i) CHECK(w[i] == 0.25);
  CHECK_THROWS_AS(equal_weight(0), std::invalid_argument);
}
