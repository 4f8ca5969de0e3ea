#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace copula_exo {

enum class CovarianceEstimator {
  /// rmse^2 (X'X)^{-1}
  homoskedastic,
  /// White sandwich with the T / (T - p) small-sample factor.
  hc1,
};

struct OlsFit {
  Eigen::VectorXd coefficients;  ///< in design column order
  Eigen::VectorXd residuals;
  double rmse = 0.0;  ///< sqrt(RSS / dof)
  Eigen::MatrixXd coef_cov;
  std::size_t dof = 0;  ///< T - p
  CovarianceEstimator estimator = CovarianceEstimator::homoskedastic;

  std::size_t observations() const {
    return static_cast<std::size_t>(residuals.size());
  }
  std::size_t parameters() const {
    return static_cast<std::size_t>(coefficients.size());
  }
  double standard_error(std::size_t j) const;
};

/// Least squares via column-pivoted Householder QR.
///
/// Throws InsufficientData when T <= p, RankDeficient when the smallest
/// |R_kk| falls below 1e-10 * |R_00| (the exception names the design column
/// that pivoted last), NumericalError on non-finite input.
OlsFit ols_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
               CovarianceEstimator estimator = CovarianceEstimator::homoskedastic);

struct WaldOutcome {
  double statistic = 0.0;
  unsigned df = 0;
  double p_value = 1.0;
  Eigen::MatrixXd restriction;  ///< R
  Eigen::VectorXd target;       ///< r
  std::string description;

  bool rejects(double alpha) const { return p_value < alpha; }
};

/// Wald test of R theta = r: (R theta - r)' (R V R')^{-1} (R theta - r),
/// referred to chi-squared with q = rows(R) degrees of freedom.
/// Throws SingularRestriction when R V R' has condition number > 1e12.
/// A discrepancy R theta - r at rounding level relative to the coefficients
/// gives statistic 0 without looking at V.
WaldOutcome wald_linear(const OlsFit& fit, const Eigen::MatrixXd& restriction,
                        const Eigen::VectorXd& target,
                        std::string description = {});

/// Single-coefficient test of theta_j = 0 with the Student-t reference.
struct CoefficientTest {
  double estimate = 0.0;
  double standard_error = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;  ///< two-sided, t with fit.dof degrees of freedom
};

CoefficientTest coefficient_test(const OlsFit& fit, std::size_t j);

/// Lower-triangular L with L L' = A. Throws NotPositiveDefinite carrying the
/// failing pivot, DomainError if A is not square and symmetric within 1e-10.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a);

/// Pearson correlation matrix of equal-length columns. Unit diagonal,
/// symmetric, entries clamped to [-1, 1]. Throws DegenerateColumn for a
/// constant column and InsufficientData for fewer than two observations.
Eigen::MatrixXd sample_correlation_matrix(
    std::span<const Eigen::VectorXd> columns);
Eigen::MatrixXd sample_correlation_matrix(const Eigen::MatrixXd& columns);

/// Pearson correlation of two equal-length vectors.
double sample_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace copula_exo
