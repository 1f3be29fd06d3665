#include <doctest.h>

#include <boost/math/distributions/students_t.hpp>

#include "launchpulse/inference.hpp"
#include "launchpulse/stats.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace launchpulse;

namespace {

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& Z) {
  Eigen::MatrixXd X(Z.rows(), Z.cols() + 1);
  X.col(0).setOnes();
  X.rightCols(Z.cols()) = Z;
  return X;
}

std::vector<std::string> names(Eigen::Index k) {
  std::vector<std::string> out;
  for (Eigen::Index j = 0; j < k; ++j) out.push_back("x" + std::to_string(j));
  return out;
}

}  // namespace

TEST_SUITE("inference") {
  TEST_CASE("exact line is recovered with zero residuals") {
    Eigen::MatrixXd X(5, 2);
    X << 1, 0, 1, 1, 1, 2, 1, 3, 1, 4;
    Eigen::VectorXd y = 2.0 + 3.0 * X.col(1).array();
    const auto fit = fit_regression(X, y, {"intercept", "x"});
    CHECK(fit.coefficients(0) == doctest::Approx(2.0));
    CHECK(fit.coefficients(1) == doctest::Approx(3.0));
    CHECK(fit.perfect_fit);
    CHECK(fit.se.isZero());
    CHECK(fit.p_values(1) == 0.0);
  }

  TEST_CASE("constant y gives a pure intercept") {
    launchpulse::Rng rng(1);
    Eigen::MatrixXd X = with_intercept(testing::random_matrix(rng, 20, 2));
    Eigen::VectorXd y = Eigen::VectorXd::Constant(20, 7.5);
    const auto fit = fit_regression(X, y, names(3));
    CHECK(fit.coefficients(0) == doctest::Approx(7.5));
    CHECK(std::fabs(fit.coefficients(1)) < 1e-12);
  }

  TEST_CASE("coefficients and HC1 match the long-double oracle") {
    launchpulse::Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::Index n = 40 + 10 * trial, k = 2 + trial % 5;
      Eigen::MatrixXd X = with_intercept(testing::random_matrix(rng, n, k));
      Eigen::VectorXd e = testing::random_vector(rng, n);
      for (Eigen::Index i = 0; i < n; ++i) e(i) *= 0.5 + std::fabs(X(i, 1));  // heteroskedastic
      Eigen::VectorXd y = X * Eigen::VectorXd::LinSpaced(k + 1, -1, 2) + e;
      const auto fit = fit_regression(X, y, names(k + 1));
      const auto ref = oracle::ols(X, y);
      CHECK((fit.coefficients - ref.beta).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK((fit.covariance_hc1 - ref.hc1).cwiseAbs().maxCoeff() <= 1e-8);
      // normal equations: residuals orthogonal to every column
      CHECK((X.transpose() * fit.residuals).cwiseAbs().maxCoeff() <= 1e-8 * y.norm() * X.norm());
    }
  }

  TEST_CASE("scaling y scales coefficients and standard errors") {
    launchpulse::Rng rng(4);
    Eigen::MatrixXd X = with_intercept(testing::random_matrix(rng, 60, 3));
    Eigen::VectorXd y = testing::random_vector(rng, 60);
    const auto a = fit_regression(X, y, names(4));
    const auto b = fit_regression(X, 3.0 * y, names(4));
    CHECK((b.coefficients - 3.0 * a.coefficients).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((b.se - 3.0 * a.se).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((b.p_values - a.p_values).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("p-values match Boost's Student-t") {
    for (double dof : {1.0, 3.0, 10.0, 57.0, 400.0}) {
      boost::math::students_t dist(dof);
      for (double t : {0.0, 0.3, 1.0, 1.96, 2.5, 4.0, 9.0}) {
        const double ref = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
        CHECK(stats::student_t_two_sided(t, dof) == doctest::Approx(ref).epsilon(1e-10));
        CHECK(stats::student_t_two_sided(-t, dof) == stats::student_t_two_sided(t, dof));
      }
    }
    CHECK(stats::student_t_two_sided(0.0, 5) == 1.0);
    CHECK(stats::student_t_two_sided(std::numeric_limits<double>::infinity(), 5) == 0.0);
  }

  TEST_CASE("rank deficiency names the dependent column") {
    launchpulse::Rng rng(8);
    Eigen::MatrixXd X = with_intercept(testing::random_matrix(rng, 30, 2));
    Eigen::MatrixXd Xd(30, 4);
    Xd << X, X.col(1) + X.col(2);
    const std::vector<std::string> cols = {"intercept", "a", "b", "a_plus_b"};
    try {
      fit_regression(Xd, testing::random_vector(rng, 30), cols);
      FAIL("expected RankDeficientError");
    } catch (const RankDeficientError& e) {
      CHECK(e.columns().size() == 1);
      CHECK(std::string(e.what()).find("dependent columns") != std::string::npos);
    }
  }

  TEST_CASE("n <= k is an error") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(fit_regression(X, Eigen::VectorXd::Ones(3), names(3)), std::invalid_argument);
  }

  TEST_CASE("coef_table flags controls") {
    launchpulse::Rng rng(2);
    Eigen::MatrixXd X = with_intercept(testing::random_matrix(rng, 25, 2));
    const auto fit = fit_regression(X, testing::random_vector(rng, 25), {"intercept", "treat", "baseline_stars"});
    const auto rows = coef_table(fit, {"baseline_stars"});
    REQUIRE(rows.size() == 3);
    CHECK_FALSE(rows[1].is_control);
    CHECK(rows[2].is_control);
    CHECK(rows[1].p >= 0.0);
    CHECK(rows[1].p <= 1.0);
  }
}
