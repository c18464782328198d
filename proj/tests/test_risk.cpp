#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "helpers.hpp"
#include "riskparity/evolution.hpp"
#include "riskparity/risk.hpp"

using namespace riskparity;

namespace {

CovarianceMatrix two_asset() {
  Eigen::MatrixXd m(2, 2);
  m << 0.04, 0.01, 0.01, 0.09;
  return CovarianceMatrix(m);
}

CovarianceMatrix identity(int n) {
  return CovarianceMatrix(Eigen::MatrixXd::Identity(n, n));
}

Eigen::Vector2d v2(double a, double b) { return Eigen::Vector2d(a, b); }

// Reference implementation of the pairwise fitness, the literal double loop.
double fitness_total_pairwise(const Eigen::VectorXd& x,
                              const CovarianceMatrix& cov) {
  const Eigen::VectorXd tc = total_contributions(x, cov);
  double sum = 0.0;
  for (int i = 0; i < tc.size(); ++i) {
    for (int j = 0; j < tc.size(); ++j) {
      sum += (tc[i] - tc[j]) * (tc[i] - tc[j]);
    }
  }
  return sum;
}

}  // namespace

TEST_CASE("covariance matrix validation") {
  CHECK_THROWS_AS(CovarianceMatrix(Eigen::MatrixXd::Zero(2, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(CovarianceMatrix(Eigen::MatrixXd(0, 0)),
                  std::invalid_argument);

  Eigen::MatrixXd asym(2, 2);
  asym << 0.04, 0.02, 0.01, 0.09;
  CHECK_THROWS_AS(CovarianceMatrix{asym}, std::invalid_argument);

  Eigen::MatrixXd negdiag(2, 2);
  negdiag << -0.04, 0.0, 0.0, 0.09;
  CHECK_THROWS_AS(CovarianceMatrix{negdiag}, std::invalid_argument);

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 0.01, 0.05, 0.05, 0.01;  // eigenvalues 0.06 and -0.04
  CHECK_THROWS_AS(CovarianceMatrix{indefinite}, std::invalid_argument);

  // Singular but PSD passes; it is just not positive definite.
  Eigen::MatrixXd singular(2, 2);
  singular << 1.0, -1.0, -1.0, 1.0;
  const CovarianceMatrix psd(singular);
  CHECK_FALSE(psd.is_positive_definite());
  CHECK(two_asset().is_positive_definite());
}

TEST_CASE("portfolio risk") {
  CHECK(portfolio_risk(v2(0.5, 0.5), identity(2)) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(portfolio_risk(v2(0.6, 0.4), two_asset()) ==
        doctest::Approx(0.18330302779823358).epsilon(1e-12));
  CHECK(portfolio_risk(Eigen::VectorXd::Constant(5, 0.2), identity(5)) ==
        doctest::Approx(std::sqrt(5 * 0.04)).epsilon(1e-12));

  CHECK_THROWS_AS(portfolio_risk(Eigen::VectorXd::Ones(3), identity(2)),
                  std::invalid_argument);
}

TEST_CASE("negative quadratic form is rejected beyond tolerance") {
  // Barely indefinite matrix that still passes construction: eigenvalues
  // 1 and -5e-11 (inside the -1e-10 * lambda_max construction slack).
  Eigen::MatrixXd m(2, 2);
  m << 0.499999999975, 0.500000000025, 0.500000000025, 0.499999999975;
  const CovarianceMatrix cov(m);
  // Along the negative eigenvector, scaled so the form dips below -1e-12.
  CHECK_THROWS_AS(portfolio_risk(v2(5.0, -5.0), cov), std::invalid_argument);
  // Small vectors stay inside the clamp band and read as zero risk.
  CHECK(portfolio_risk(v2(1e-3, -1e-3), cov) == 0.0);
}

TEST_CASE("risk contributions") {
  const CovarianceMatrix cov = two_asset();
  const Eigen::Vector2d x = v2(0.6, 0.4);

  const Eigen::VectorXd mc = marginal_contributions(x, cov);
  CHECK(mc[0] == doctest::Approx(0.15275252316519466).epsilon(1e-12));
  CHECK(mc[1] == doctest::Approx(0.22912878474779198).epsilon(1e-12));

  const Eigen::VectorXd tc = total_contributions(x, cov);
  CHECK(tc[0] == doctest::Approx(0.0168).epsilon(1e-14));
  CHECK(tc[1] == doctest::Approx(0.0168).epsilon(1e-14));

  const Eigen::VectorXd rc = normalized_contributions(x, cov);
  CHECK(rc[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(rc[1] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(rc.sum() == doctest::Approx(1.0).epsilon(1e-14));

  // Degenerate: weights in the null space of a singular PSD matrix.
  Eigen::MatrixXd singular(2, 2);
  singular << 1.0, -1.0, -1.0, 1.0;
  const CovarianceMatrix psd(singular);
  CHECK_THROWS_AS(marginal_contributions(v2(0.5, 0.5), psd),
                  std::domain_error);
  CHECK(std::isinf(
      fitness_or_infinity(v2(0.5, 0.5), psd, FitnessKind::marginal)));
}

TEST_CASE("fitness values match hand computations") {
  const CovarianceMatrix cov = two_asset();
  CHECK(fitness_marginal(v2(0.6, 0.4), cov) ==
        doctest::Approx(0.0029166666666666664).epsilon(1e-9));
  CHECK(fitness_total(v2(0.6, 0.4), cov) < 1e-20);

  // Interior minimum variance point equalizes the gradient (Cx)_i, hence
  // the marginal dispersion vanishes there.
  CHECK(fitness_marginal(v2(8.0 / 11.0, 3.0 / 11.0), cov) < 1e-18);

  Eigen::MatrixXd d(2, 2);
  d << 1.0, 0.0, 0.0, 4.0;
  CHECK(fitness_total(v2(0.5, 0.5), CovarianceMatrix(d)) ==
        doctest::Approx(1.125).epsilon(1e-12));
  CHECK(fitness_total(v2(1.0, 0.0), identity(2)) ==
        doctest::Approx(2.0).epsilon(1e-12));

  CHECK(evaluate_fitness(v2(0.6, 0.4), cov, FitnessKind::marginal) ==
        fitness_marginal(v2(0.6, 0.4), cov));
  CHECK(evaluate_fitness(v2(0.6, 0.4), cov, FitnessKind::total) ==
        fitness_total(v2(0.6, 0.4), cov));
}

TEST_CASE("fitness kind parsing") {
  CHECK(fitness_kind_from_string("marginal") == FitnessKind::marginal);
  CHECK(fitness_kind_from_string("total") == FitnessKind::total);
  CHECK_THROWS_AS(fitness_kind_from_string("other"), std::invalid_argument);
  CHECK(std::string(to_string(FitnessKind::total)) == "total");
}

TEST_CASE("repair and normalization") {
  const Bounds unit = Bounds::uniform(2, 0.0, 1.0);

  auto r = repair_normalize(v2(2.0, 2.0), unit);
  REQUIRE(r.has_value());
  CHECK((*r)[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK((*r)[1] == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_FALSE(repair_normalize(v2(1.0, -1.0), unit).has_value());
  CHECK_FALSE(repair_normalize(v2(5e-9, 4e-9), unit).has_value());

  // Clip-and-renormalize pulls an out-of-box direction back inside.
  const Bounds half = Bounds::uniform(2, 0.0, 0.5);
  auto c = repair_normalize(v2(0.9, 0.1), half);
  REQUIRE(c.has_value());
  CHECK(half.contains(*c, 1e-9));
  CHECK(c->sum() == doctest::Approx(1.0).epsilon(1e-9));

  // A negative total still normalizes (the direction flips sign).
  auto n = repair_normalize(v2(-2.0, -2.0), unit);
  REQUIRE(n.has_value());
  CHECK((*n)[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("repair respects long-short boxes") {
  const Bounds ls = Bounds::uniform(4, -0.2, 1.0);
  Rng rng(99);
  int repaired = 0;
  for (int k = 0; k < 500; ++k) {
    const Eigen::VectorXd raw = random_chromosome(ls, rng);
    if (auto x = repair_normalize(raw, ls)) {
      ++repaired;
      CHECK(ls.contains(*x, 1e-9));
      CHECK(std::abs(x->sum() - 1.0) <= 1e-9);
    }
  }
  CHECK(repaired > 400);  // failures should be the rare near-zero-sum draws
}

TEST_CASE("bounds validation") {
  CHECK_THROWS_AS(Bounds::uniform(3, 0.5, 0.4).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(Bounds::uniform(3, 0.5, 1.0).validate(), infeasible_error);
  CHECK_THROWS_AS(Bounds::uniform(3, -1.0, 0.2).validate(), infeasible_error);
  CHECK_NOTHROW(Bounds::uniform(3, -0.2, 1.0).validate());
}

TEST_CASE("Euler decomposition and normalization properties") {
  Rng rng(7);
  for (int n : {2, 3, 5, 8}) {
    const CovarianceMatrix cov = rptest::random_cov(n, rng);
    const Bounds b = Bounds::uniform(n, -0.2, 1.0);
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd x = random_feasible_portfolio(b, rng);
      const double sigma = portfolio_risk(x, cov);
      const Eigen::VectorXd tc = total_contributions(x, cov);
      CHECK(tc.sum() == doctest::Approx(sigma * sigma).epsilon(1e-12));

      const Eigen::VectorXd mc = marginal_contributions(x, cov);
      CHECK((x.cwiseProduct(mc)).sum() == doctest::Approx(sigma).epsilon(1e-12));

      const Eigen::VectorXd rc = normalized_contributions(x, cov);
      CHECK(rc.sum() == doctest::Approx(1.0).epsilon(1e-12));
      // Normalization is marginal based: each share is mc_i over the total.
      for (int i = 0; i < n; ++i) {
        CHECK(rc[i] == doctest::Approx(mc[i] / mc.sum()).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("homogeneity and scaling laws") {
  Rng rng(21);
  const CovarianceMatrix cov = rptest::random_cov(6, rng);
  const Bounds b = Bounds::uniform(6, 0.0, 1.0);
  for (double t : {0.5, 2.0, 7.5}) {
    for (int k = 0; k < 10; ++k) {
      const Eigen::VectorXd x = random_feasible_portfolio(b, rng);
      CHECK(portfolio_risk(t * x, cov) ==
            doctest::Approx(t * portfolio_risk(x, cov)).epsilon(1e-12));
      // Marginal contributions are scale free, so is their dispersion.
      CHECK((marginal_contributions(t * x, cov) -
             marginal_contributions(x, cov))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
      CHECK(fitness_marginal(t * x, cov) ==
            doctest::Approx(fitness_marginal(x, cov)).epsilon(1e-9));
      // Total contributions are quadratic in scale; the pairwise fitness
      // therefore scales with t^4.
      CHECK(fitness_total(t * x, cov) ==
            doctest::Approx(std::pow(t, 4) * fitness_total(x, cov))
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("pairwise identity for fitness_total") {
  Rng rng(5);
  for (int n : {2, 4, 7}) {
    const CovarianceMatrix cov = rptest::random_cov(n, rng);
    const Bounds b = Bounds::uniform(n, -0.2, 1.0);
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd x = random_feasible_portfolio(b, rng);
      const double fast = fitness_total(x, cov);
      const double slow = fitness_total_pairwise(x, cov);
      CHECK(fast == doctest::Approx(slow).epsilon(1e-9));
    }
  }
}

TEST_CASE("risk report aggregates all measures consistently") {
  const CovarianceMatrix cov = two_asset();
  const Eigen::Vector2d x = v2(0.6, 0.4);
  const RiskReport r = risk_report(x, cov);
  CHECK(r.sigma == portfolio_risk(x, cov));
  CHECK(r.fitness_marginal == fitness_marginal(x, cov));
  CHECK(r.fitness_total == fitness_total(x, cov));
  CHECK((r.normalized - normalized_contributions(x, cov)).cwiseAbs().maxCoeff() ==
        0.0);
}
