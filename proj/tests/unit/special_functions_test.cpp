#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "copula_exo/errors.hpp"
#include "copula_exo/special_functions.hpp"
#include "oracles/oracles.hpp"

namespace copula_exo {
namespace {

TEST(NormalCdf, CentreIsOneHalf) { EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5); }

TEST(NormalCdf, MatchesSeriesOracle) {
  for (double x : {-5.5, -3.0, -1.959964, -0.7, -0.1, 0.3, 0.7, 1.959964, 2.5, 4.0}) {
    EXPECT_NEAR(normal_cdf(x), oracle::normal_cdf_series(x), 1e-12) << x;
  }
  EXPECT_NEAR(normal_cdf(1.959964), 0.975, 1e-8);
}

TEST(NormalCdf, Reflection) {
  EXPECT_NEAR(normal_cdf(-0.7), 1.0 - normal_cdf(0.7), 1e-15);
  EXPECT_NEAR(normal_sf(0.7), normal_cdf(-0.7), 1e-16);
}

TEST(NormalCdf, Monotone) {
  double last = 0.0;
  for (double x = -9.0; x <= 9.0; x += 0.01) {
    const double f = normal_cdf(x);
    ASSERT_GE(f, last);
    last = f;
  }
}

TEST(NormalQuantile, KnownPoints) {
  EXPECT_DOUBLE_EQ(normal_quantile(0.5), 0.0);
  EXPECT_NEAR(normal_quantile(0.975), oracle::normal_quantile_bisection(0.975),
              1e-12);
  EXPECT_NEAR(normal_quantile(0.975), 1.959964, 1e-6);
}

TEST(NormalQuantile, RejectsBoundary) {
  EXPECT_THROW(normal_quantile(1.0), DomainError);
  EXPECT_THROW(normal_quantile(0.0), DomainError);
  EXPECT_THROW(normal_quantile(-0.2), DomainError);
  EXPECT_THROW(normal_quantile(std::nan("")), DomainError);
}

TEST(NormalQuantile, RoundTripOnRandomProbabilities) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(gen);
    ASSERT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-9) << p;
  }
}

TEST(NormalQuantile, StrictlyIncreasingIncludingTails) {
  double last = -INFINITY;
  for (double e = -300; e < -1; e += 0.5) {
    const double q = normal_quantile(std::pow(10.0, e));
    ASSERT_GT(q, last);
    last = q;
  }
  EXPECT_NEAR(normal_quantile(1e-300), -37.0471, 1e-3);
}

TEST(ChiSquaredSf, ZeroIsFullMass) { EXPECT_DOUBLE_EQ(chi_squared_sf(0.0, 1), 1.0); }

TEST(ChiSquaredSf, OneDegreeMatchesNormalTail) {
  EXPECT_NEAR(chi_squared_sf(3.841459, 1),
              2.0 * (1.0 - oracle::normal_cdf_series(std::sqrt(3.841459))), 1e-10);
  EXPECT_NEAR(chi_squared_sf(3.841459, 1), 0.05, 1e-7);
  for (double x = 0.0; x <= 25.0; x += 0.25) {
    ASSERT_NEAR(chi_squared_sf(x, 1), 2.0 * (1.0 - normal_cdf(std::sqrt(x))), 1e-9);
  }
}

TEST(ChiSquaredSf, TwoDegreesClosedForm) {
  EXPECT_NEAR(chi_squared_sf(5.991465, 2), std::exp(-5.991465 / 2), 1e-12);
  EXPECT_NEAR(chi_squared_sf(5.991465, 2), 0.05, 1e-7);
  for (double x = 0.0; x < 60.0; x += 1.5) {
    ASSERT_NEAR(chi_squared_sf(x, 2), std::exp(-x / 2), 1e-12);
  }
}

TEST(ChiSquaredSf, EvenDegreesPoissonSum) {
  // sf(x, 2k) = exp(-x/2) sum_{j<k} (x/2)^j / j!
  for (unsigned k = 1; k <= 25; ++k) {
    for (double x : {0.5, 3.0, 10.0, 40.0, 80.0}) {
      double term = 1.0;
      double sum = 1.0;
      for (unsigned j = 1; j < k; ++j) {
        term *= (x / 2) / j;
        sum += term;
      }
      const double expected = std::exp(-x / 2) * sum;
      ASSERT_NEAR(chi_squared_sf(x, 2 * k), expected, 1e-10 * std::max(1.0, expected))
          << x << " " << 2 * k;
    }
  }
}

TEST(ChiSquaredSf, DecreasingInX) {
  for (unsigned df : {1u, 3u, 10u, 50u}) {
    double last = 1.0;
    for (double x = 0.0; x < 120.0; x += 0.5) {
      const double s = chi_squared_sf(x, df);
      ASSERT_LE(s, last);
      last = s;
    }
  }
}

TEST(ChiSquaredSf, Errors) {
  EXPECT_THROW(chi_squared_sf(-1.0, 1), DomainError);
  EXPECT_THROW(chi_squared_sf(1.0, 0), DomainError);
}

TEST(StudentTSf, Symmetry) {
  for (unsigned df : {1u, 2u, 5u, 30u}) {
    EXPECT_DOUBLE_EQ(student_t_sf(0.0, df), 0.5);
    for (double x : {0.1, 1.0, 2.5, 7.0}) {
      EXPECT_NEAR(student_t_sf(-x, df), 1.0 - student_t_sf(x, df), 1e-12);
    }
  }
}

TEST(StudentTSf, MatchesQuadratureOracle) {
  EXPECT_NEAR(student_t_sf(2.570582, 5), 0.025, 1e-8);
  for (unsigned df : {1u, 2u, 5u, 12u, 40u}) {
    for (double x : {0.3, 1.0, 2.570582, 4.0, 9.0}) {
      EXPECT_NEAR(student_t_sf(x, df), oracle::student_t_sf_quadrature(x, df), 1e-10)
          << x << " " << df;
    }
  }
}

TEST(StudentTSf, FarTail) { EXPECT_LT(student_t_sf(100.0, 5), 1e-8); }

TEST(StudentTSf, ZeroDegreesRejected) { EXPECT_THROW(student_t_sf(1.0, 0), DomainError); }

TEST(RegularizedBeta, MatchesQuadratureOracle) {
  for (auto [a, b] : {std::pair{0.5, 0.5}, {2.0, 3.0}, {5.0, 1.5}, {0.8, 7.0}}) {
    for (double x : {0.05, 0.3, 0.5, 0.9}) {
      EXPECT_NEAR(regularized_beta(a, b, x), oracle::incomplete_beta_quadrature(a, b, x),
                  1e-9)
          << a << " " << b << " " << x;
    }
  }
}

TEST(RegularizedGamma, ComplementsSumToOne) {
  for (double a : {0.5, 1.0, 4.5, 20.0}) {
    for (double x : {0.1, 1.0, 5.0, 30.0}) {
      EXPECT_NEAR(regularized_gamma_p(a, x) + regularized_gamma_q(a, x), 1.0, 1e-14);
    }
  }
  EXPECT_NEAR(regularized_gamma_p(1.0, 2.0), 1.0 - std::exp(-2.0), 1e-15);
}

}  // namespace
}  // namespace copula_exo
