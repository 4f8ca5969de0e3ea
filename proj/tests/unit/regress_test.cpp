#include <cmath>

#include <gtest/gtest.h>

#include "copula_exo/errors.hpp"
#include "copula_exo/regress.hpp"
#include "copula_exo/rng.hpp"
#include "copula_exo/special_functions.hpp"
#include "oracles/oracles.hpp"

namespace copula_exo {
namespace {

Eigen::MatrixXd random_design(int t, int extra, RngStream& rng) {
  Eigen::MatrixXd x(t, extra + 1);
  x.col(0).setOnes();
  for (int i = 0; i < t; ++i) {
    for (int j = 1; j <= extra; ++j) x(i, j) = rng.normal();
  }
  return x;
}

TEST(OlsFit, ExactLine) {
  Eigen::MatrixXd x(10, 2);
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) {
    x(i, 0) = 1;
    x(i, 1) = i * 0.5 - 1;
    y(i) = 2 + 3 * x(i, 1);
  }
  const auto fit = ols_fit(x, y);
  EXPECT_NEAR(fit.coefficients(0), 2.0, 1e-12);
  EXPECT_NEAR(fit.coefficients(1), 3.0, 1e-12);
  EXPECT_NEAR(fit.rmse, 0.0, 1e-12);
  EXPECT_EQ(fit.dof, 8u);
}

TEST(OlsFit, OrthogonalResponseHasZeroSlope) {
  Eigen::MatrixXd x(4, 2);
  x << 1, -1, 1, 1, 1, -1, 1, 1;
  Eigen::VectorXd y(4);
  y << 1, 1, 3, 3;
  EXPECT_NEAR(ols_fit(x, y).coefficients(1), 0.0, 1e-14);
}

TEST(OlsFit, RecoversStructuralSlope) {
  const int t = 10000;
  RngStream rng(10, 0);
  Eigen::MatrixXd design(t, 3);
  Eigen::VectorXd y(t);
  for (int i = 0; i < t; ++i) {
    const double x = rng.normal();
    const double p = 1 + 0.1 * x + rng.normal();
    design.row(i) << 1, x, p;
    y(i) = 1 + 0.3 * x + p + rng.normal();
  }
  const auto fit = ols_fit(design, y);
  EXPECT_NEAR(fit.coefficients(2), 1.0, 0.05);
}

TEST(OlsFit, NormalEquationsAndCovarianceShape) {
  RngStream rng(11, 0);
  const Eigen::MatrixXd x = random_design(300, 4, rng);
  Eigen::VectorXd y(300);
  for (auto& v : y) v = rng.normal();
  y += x * Eigen::VectorXd::LinSpaced(5, -1, 1);
  const auto fit = ols_fit(x, y);
  const Eigen::VectorXd g = x.transpose() * fit.residuals;
  EXPECT_LT(g.cwiseAbs().maxCoeff(), 1e-8 * x.norm() * fit.residuals.norm());
  EXPECT_LT((fit.coef_cov - fit.coef_cov.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE((fit.coef_cov.diagonal().array() >= 0).all());
  const Eigen::MatrixXd expected =
      fit.rmse * fit.rmse * (x.transpose() * x).inverse();
  EXPECT_LT((fit.coef_cov - expected).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(fit.rmse * fit.rmse,
              fit.residuals.squaredNorm() / static_cast<double>(fit.dof), 1e-12);
}

TEST(OlsFit, DuplicatedColumnIsRankDeficient) {
  RngStream rng(12, 0);
  Eigen::MatrixXd x = random_design(50, 3, rng);
  x.col(3) = x.col(2);
  Eigen::VectorXd y = Eigen::VectorXd::Random(50);
  try {
    ols_fit(x, y);
    FAIL() << "expected RankDeficient";
  } catch (const RankDeficient& e) {
    ASSERT_TRUE(e.column().has_value());
    EXPECT_TRUE(*e.column() == 2 || *e.column() == 3);
  }
}

TEST(OlsFit, TooFewObservations) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 3);
  EXPECT_THROW(ols_fit(x, Eigen::VectorXd::Random(3)), InsufficientData);
}

TEST(OlsFit, NonFiniteInput) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(10, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Random(10);
  y(3) = NAN;
  EXPECT_THROW(ols_fit(x, y), NumericalError);
}

TEST(OlsFit, Hc1AgreesUnderHomoskedasticity) {
  RngStream rng(13, 0);
  const Eigen::MatrixXd x = random_design(20000, 2, rng);
  Eigen::VectorXd y(20000);
  for (auto& v : y) v = rng.normal();
  const auto a = ols_fit(x, y);
  const auto b = ols_fit(x, y, CovarianceEstimator::hc1);
  EXPECT_EQ(b.estimator, CovarianceEstimator::hc1);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR(b.standard_error(j) / a.standard_error(j), 1.0, 0.05);
  }
}

TEST(WaldLinear, SatisfiedRestrictionGivesZero) {
  RngStream rng(14, 0);
  const Eigen::MatrixXd x = random_design(100, 2, rng);
  Eigen::VectorXd y(100);
  for (auto& v : y) v = rng.normal();
  const auto fit = ols_fit(x, y);
  Eigen::MatrixXd r(1, 3);
  r << 0, 1, 0;
  const auto w = wald_linear(fit, r, fit.coefficients.segment(1, 1));
  EXPECT_NEAR(w.statistic, 0.0, 1e-20);
  EXPECT_DOUBLE_EQ(w.p_value, 1.0);
  EXPECT_EQ(w.df, 1u);
}

TEST(WaldLinear, SingleCoefficientIsSquaredT) {
  RngStream rng(15, 0);
  const Eigen::MatrixXd x = random_design(80, 3, rng);
  Eigen::VectorXd y(80);
  for (auto& v : y) v = rng.normal();
  y += 0.3 * x.col(2);
  const auto fit = ols_fit(x, y);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(1, 4);
  r(0, 2) = 1;
  const auto w = wald_linear(fit, r, Eigen::VectorXd::Zero(1));
  const auto t = coefficient_test(fit, 2);
  EXPECT_NEAR(w.statistic, t.t_statistic * t.t_statistic, 1e-10);
  EXPECT_NEAR(w.p_value, chi_squared_sf(w.statistic, 1), 1e-15);
  EXPECT_NEAR(t.p_value, 2 * student_t_sf(std::fabs(t.t_statistic), 76), 1e-14);
}

TEST(WaldLinear, BlockDiagonalStatisticsAdd) {
  // Orthogonal centred columns give diagonal X'X and so diagonal coef_cov.
  const int t = 16;
  Eigen::MatrixXd x(t, 4);
  for (int i = 0; i < t; ++i) {
    x(i, 0) = 1;
    x(i, 1) = (i & 1) ? 1 : -1;
    x(i, 2) = (i & 2) ? 1 : -1;
    x(i, 3) = (i & 4) ? 1 : -1;
  }
  RngStream rng(16, 0);
  Eigen::VectorXd y(t);
  for (auto& v : y) v = rng.normal();
  const auto fit = ols_fit(x, y);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(3, 4);
  double sum = 0.0;
  for (int j = 0; j < 3; ++j) {
    r(j, j + 1) = 1;
    sum += wald_linear(fit, r.row(j), Eigen::VectorXd::Zero(1)).statistic;
  }
  const auto joint = wald_linear(fit, r, Eigen::VectorXd::Zero(3));
  EXPECT_EQ(joint.df, 3u);
  EXPECT_NEAR(joint.statistic, sum, 1e-10 * sum);
}

TEST(WaldLinear, NullCalibration) {
  int rejections = 0;
  const int reps = 1000;
  for (int rep = 0; rep < reps; ++rep) {
    RngStream rng(17, static_cast<std::uint64_t>(rep));
    const Eigen::MatrixXd x = random_design(200, 3, rng);
    Eigen::VectorXd y(200);
    for (auto& v : y) v = rng.normal();
    y += x * Eigen::Vector4d(1, 0.5, 0, 0);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(1, 4);
    r(0, 3) = 1;
    if (wald_linear(ols_fit(x, y), r, Eigen::VectorXd::Zero(1)).rejects(0.05)) {
      ++rejections;
    }
  }
  const double rate = static_cast<double>(rejections) / reps;
  EXPECT_GE(rate, 0.03);
  EXPECT_LE(rate, 0.08);
}

TEST(WaldLinear, SingularRestriction) {
  RngStream rng(18, 0);
  const Eigen::MatrixXd x = random_design(60, 2, rng);
  Eigen::VectorXd y(60);
  for (auto& v : y) v = rng.normal();
  const auto fit = ols_fit(x, y);
  Eigen::MatrixXd r(2, 3);
  r << 0, 1, 0, 0, 2, 0;
  EXPECT_THROW(wald_linear(fit, r, Eigen::VectorXd::Zero(2)), SingularRestriction);
  EXPECT_THROW(wald_linear(fit, Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Zero(1)),
               DomainError);
}

TEST(CholeskyLower, Identity) {
  EXPECT_EQ(cholesky_lower(Eigen::MatrixXd::Identity(4, 4)),
            Eigen::MatrixXd::Identity(4, 4));
}

TEST(CholeskyLower, InstrumentCorrelation) {
  Eigen::Matrix3d a;
  a << 1, 0.2, 0.3, 0.2, 1, 0.4, 0.3, 0.4, 1;
  const Eigen::MatrixXd l = cholesky_lower(a);
  EXPECT_TRUE(l.isLowerTriangular());
  EXPECT_LT((l * l.transpose() - a).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CholeskyLower, NotPositiveDefinite) {
  Eigen::Matrix2d a;
  a << 1, 1.1, 1.1, 1;
  try {
    cholesky_lower(a);
    FAIL();
  } catch (const NotPositiveDefinite& e) {
    EXPECT_EQ(e.pivot(), 1u);
  }
  Eigen::Matrix2d asym;
  asym << 1, 0.2, 0.3, 1;
  EXPECT_THROW(cholesky_lower(asym), DomainError);
}

TEST(CholeskyLower, RandomPositiveDefiniteRoundTrip) {
  for (int k = 0; k < 100; ++k) {
    RngStream rng(19, static_cast<std::uint64_t>(k));
    const int n = 2 + k % 9;
    Eigen::MatrixXd m(n, n);
    for (auto& v : m.reshaped()) v = rng.normal();
    const Eigen::MatrixXd a =
        m.transpose() * m + 0.1 * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd l = cholesky_lower(a);
    ASSERT_LE((l * l.transpose() - a).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(SampleCorrelation, SelfAndOrthogonal) {
  Eigen::VectorXd a(4), b(4);
  a << -1, 1, -1, 1;
  b << -1, -1, 1, 1;
  Eigen::MatrixXd twice(4, 2);
  twice << a, a;
  EXPECT_TRUE(sample_correlation_matrix(twice).isApprox(Eigen::MatrixXd::Ones(2, 2)));
  Eigen::MatrixXd both(4, 2);
  both << a, b;
  const auto c = sample_correlation_matrix(both);
  EXPECT_NEAR(c(0, 1), 0.0, 1e-12);
  EXPECT_EQ(c(0, 0), 1.0);
}

TEST(SampleCorrelation, PropertiesOnRandomColumns) {
  RngStream rng(20, 0);
  Eigen::MatrixXd x(50, 5);
  for (auto& v : x.reshaped()) v = rng.normal();
  x.col(4) = x.col(0) * 2 + x.col(1);
  const auto c = sample_correlation_matrix(x);
  EXPECT_LT((c - c.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE((c.diagonal().array() == 1.0).all());
  EXPECT_LE(c.cwiseAbs().maxCoeff(), 1.0);
}

TEST(SampleCorrelation, Errors) {
  Eigen::MatrixXd x(5, 2);
  x << 1, 2, 1, 3, 1, 4, 1, 5, 1, 6;
  EXPECT_THROW(sample_correlation_matrix(x), DegenerateColumn);
  EXPECT_THROW(sample_correlation_matrix(Eigen::MatrixXd::Ones(1, 2)), InsufficientData);
}

}  // namespace
}  // namespace copula_exo
