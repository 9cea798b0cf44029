#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace gaselect;

namespace {

struct Sample {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Sample simulate_logit(const Eigen::VectorXd& beta, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u;
  Sample s{Eigen::MatrixXd(n, beta.size() - 1), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    double eta = beta[0];
    for (Eigen::Index j = 0; j + 1 < beta.size(); ++j) {
      s.x(i, j) = z(rng);
      eta += s.x(i, j) * beta[j + 1];
    }
    s.y[i] = u(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
  }
  return s;
}

}  // namespace

TEST(Fit, InterceptOnlyIsLogitOfMean) {
  Eigen::MatrixXd x(100, 0);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(100);
  y.head(30).setOnes();
  auto m = fit(x, y);
  ASSERT_TRUE(m.converged);
  EXPECT_NEAR(m.coefficients[0], std::log(0.3 / 0.7), 1e-8);
  EXPECT_NEAR(m.coefficients[0], -0.8473, 5e-5);
}

TEST(Fit, BalancedInterceptOnly) {
  Eigen::MatrixXd x(100, 0);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(100);
  y.head(50).setOnes();
  auto m = fit(x, y);
  EXPECT_NEAR(m.coefficients[0], 0.0, 1e-10);
  EXPECT_NEAR(m.log_likelihood, 100.0 * std::log(0.5), 1e-9);
  EXPECT_NEAR(aic(m), 2.0 - 200.0 * std::log(0.5), 1e-9);
  EXPECT_NEAR(aic(m), 140.63, 5e-3);
}

TEST(Fit, RecoversTruthWithinThreeSe) {
  Eigen::VectorXd beta(4);
  beta << -1.0, 0.8, -0.5, 0.3;
  auto s = simulate_logit(beta, 100000, 11);
  auto m = fit(s.x, s.y);
  ASSERT_TRUE(m.converged);
  for (Eigen::Index k = 0; k < beta.size(); ++k) EXPECT_LT(std::fabs(m.coefficients[k] - beta[k]), 3.0 * m.std_errors[k]);
}

TEST(Fit, ScoreEquationsAndGradient) {
  Eigen::VectorXd beta(3);
  beta << 0.2, 1.0, -0.7;
  auto s = simulate_logit(beta, 2000, 5);
  auto m = fit(s.x, s.y);
  ASSERT_TRUE(m.converged);
  Eigen::VectorXd g = score(s.x, s.y, m.coefficients);
  for (Eigen::Index k = 0; k < g.size(); ++k) EXPECT_LT(std::fabs(g[k]), 1e-6);
  EXPECT_NEAR(log_likelihood(s.x, s.y, m.coefficients), oracle::loglik(s.x, s.y, m.coefficients), 1e-8);

  Eigen::VectorXd probe(3);
  probe << -0.3, 0.4, 0.9;
  Eigen::VectorXd analytic = score(s.x, s.y, probe);
  Eigen::VectorXd numeric = oracle::fd_gradient(s.x, s.y, probe);
  for (Eigen::Index k = 0; k < 3; ++k)
    EXPECT_LT(std::fabs(analytic[k] - numeric[k]), 1e-6 * std::max(1.0, std::fabs(numeric[k])));
}

TEST(Fit, MeanPredictionEqualsEventRate) {
  Eigen::VectorXd beta(3);
  beta << -1.5, 0.6, 0.6;
  auto s = simulate_logit(beta, 5000, 8);
  auto m = fit(s.x, s.y);
  EXPECT_NEAR(predict(m, s.x).mean(), s.y.mean(), 1e-6);
}

TEST(Fit, SeparationReportsNonConvergence) {
  Eigen::MatrixXd x(40, 1);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = i - 19.5;
    y[i] = i >= 20 ? 1.0 : 0.0;
  }
  auto m = fit(x, y);
  EXPECT_FALSE(m.converged);
  EXPECT_TRUE(std::isfinite(m.log_likelihood));
}

TEST(Fit, Preconditions) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(5, 1);
  EXPECT_THROW(fit(x, Eigen::VectorXd::Zero(5)), std::invalid_argument);
  Eigen::VectorXd y(5);
  y << 0, 1, 2, 0, 1;
  EXPECT_THROW(fit(x, y), std::invalid_argument);
  EXPECT_THROW(fit(Eigen::MatrixXd::Ones(2, 3), Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST(Fit, ZeroColumnAddsTwoToAic) {
  Eigen::VectorXd beta(2);
  beta << 0.1, 0.9;
  auto s = simulate_logit(beta, 500, 2);
  auto m1 = fit(s.x, s.y);
  Eigen::MatrixXd x2(s.x.rows(), 2);
  x2.col(0) = s.x.col(0);
  x2.col(1).setZero();
  auto m2 = fit(x2, s.y);
  EXPECT_NEAR(aic(m2) - aic(m1), 2.0, 1e-6);
}

TEST(Fit, AicMatchesRecomputedLikelihood) {
  Eigen::VectorXd beta(4);
  beta << -0.5, 0.7, 0.0, -0.4;
  auto s = simulate_logit(beta, 3000, 21);
  for (Eigen::Index k = 1; k <= 3; ++k) {
    Eigen::MatrixXd xk = s.x.leftCols(k);
    auto m = fit(xk, s.y);
    const double ll = oracle::loglik(xk, s.y, m.coefficients);
    EXPECT_NEAR(aic(m), 2.0 * static_cast<double>(k + 1) - 2.0 * ll, 1e-7);
  }
}

TEST(Predict, Saturation) {
  FittedModel m;
  m.coefficients = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(1, 1);
  EXPECT_EQ(predict(m, x)[0], 0.5);
  m.coefficients << 800.0, 0.0;
  const double p = predict(m, x)[0];
  EXPECT_FALSE(std::isnan(p));
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1.0);
  EXPECT_THROW(predict(m, Eigen::MatrixXd::Zero(1, 2)), std::invalid_argument);
}

TEST(WaldP, ReferenceValues) {
  FittedModel m;
  m.coefficients = Eigen::VectorXd(3);
  m.coefficients << 0.0, 1.959964, 10.0;
  m.std_errors = Eigen::VectorXd::Ones(3);
  auto p = wald_p_values(m);
  EXPECT_EQ(p[0], 1.0);
  EXPECT_NEAR(p[1], 0.05, 1e-6);
  EXPECT_LT(p[2], 1e-20);
}
