#include "copula_exo/regress.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "copula_exo/errors.hpp"
#include "copula_exo/special_functions.hpp"

namespace copula_exo {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kMaxConditionNumber = 1e12;

}  // namespace

double OlsFit::standard_error(std::size_t j) const {
  const auto k = static_cast<Eigen::Index>(j);
  return std::sqrt(std::max(0.0, coef_cov(k, k)));
}

OlsFit ols_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
               CovarianceEstimator estimator) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (response.size() != n) {
    throw DomainError("ols_fit: response length " +
                      std::to_string(response.size()) +
                      " does not match design rows " + std::to_string(n));
  }
  if (p == 0) throw DomainError("ols_fit: design has no columns");
  if (n <= p) {
    throw InsufficientData("ols_fit: need more observations (" +
                           std::to_string(n) + ") than parameters (" +
                           std::to_string(p) + ")");
  }
  if (!design.allFinite() || !response.allFinite()) {
    throw NumericalError("ols_fit: non-finite value in design or response");
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::MatrixXd r =
      qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const double r_max = std::abs(r(0, 0));
  for (Eigen::Index k = 0; k < p; ++k) {
    if (!(std::abs(r(k, k)) >= kRankTolerance * r_max) || r_max == 0.0) {
      const auto column =
          static_cast<std::size_t>(qr.colsPermutation().indices()(k));
      throw RankDeficient("ols_fit: design is rank deficient (column " +
                              std::to_string(column) +
                              " is linearly dependent on the others)",
                          column);
    }
  }

  OlsFit fit;
  fit.estimator = estimator;
  fit.coefficients = qr.solve(response);
  fit.residuals = response - design * fit.coefficients;
  fit.dof = static_cast<std::size_t>(n - p);
  const double rss = fit.residuals.squaredNorm();
  fit.rmse = std::sqrt(rss / static_cast<double>(fit.dof));

  // (X'X)^{-1} = P R^{-1} R^{-T} P'
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd permuted = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  Eigen::MatrixXd bread = perm * permuted * perm.transpose();
  bread = 0.5 * (bread + bread.transpose());

  if (estimator == CovarianceEstimator::homoskedastic) {
    fit.coef_cov = fit.rmse * fit.rmse * bread;
  } else {
    const Eigen::MatrixXd scaled =
        design.array().colwise() * fit.residuals.array();
    const Eigen::MatrixXd meat = scaled.transpose() * scaled;
    fit.coef_cov = bread * meat * bread *
                   (static_cast<double>(n) / static_cast<double>(fit.dof));
  }
  fit.coef_cov = 0.5 * (fit.coef_cov + fit.coef_cov.transpose());
  return fit;
}

WaldOutcome wald_linear(const OlsFit& fit, const Eigen::MatrixXd& restriction,
                        const Eigen::VectorXd& target,
                        std::string description) {
  const Eigen::Index q = restriction.rows();
  const Eigen::Index p = fit.coefficients.size();
  if (q == 0 || restriction.cols() != p || target.size() != q || q > p) {
    throw DomainError("wald_linear: restriction must be q x p with q <= p and "
                      "a target of length q");
  }
  const Eigen::VectorXd diff = restriction * fit.coefficients - target;

  WaldOutcome out;
  out.df = static_cast<unsigned>(q);
  out.restriction = restriction;
  out.target = target;
  out.description = std::move(description);
  // A discrepancy at rounding level (e.g. an exact fit) is a zero statistic
  // whatever the covariance looks like.
  const double scale =
      restriction.cwiseAbs().maxCoeff() * fit.coefficients.cwiseAbs().sum() +
      target.cwiseAbs().maxCoeff();
  if (diff.cwiseAbs().maxCoeff() <=
      64.0 * std::numeric_limits<double>::epsilon() * scale) {
    out.statistic = 0.0;
    out.p_value = 1.0;
    return out;
  }

  Eigen::MatrixXd v = restriction * fit.coef_cov * restriction.transpose();
  v = 0.5 * (v + v.transpose());

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      v, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double condition = lo > 0.0 ? hi / lo
                                    : std::numeric_limits<double>::infinity();
  if (!(hi > 0.0) || condition > kMaxConditionNumber) {
    throw SingularRestriction(
        "wald_linear: R V R' is numerically singular (condition number " +
            std::to_string(condition) + ")",
        condition);
  }

  out.statistic = std::max(0.0, diff.dot(v.ldlt().solve(diff)));
  out.p_value = chi_squared_sf(out.statistic, out.df);
  return out;
}

CoefficientTest coefficient_test(const OlsFit& fit, std::size_t j) {
  if (j >= fit.parameters()) {
    throw DomainError("coefficient_test: index out of range");
  }
  CoefficientTest out;
  out.estimate = fit.coefficients(static_cast<Eigen::Index>(j));
  out.standard_error = fit.standard_error(j);
  if (!(out.standard_error > 0.0)) {
    throw SingularRestriction("coefficient_test: zero standard error", 0.0);
  }
  out.t_statistic = out.estimate / out.standard_error;
  out.p_value = 2.0 * student_t_sf(std::abs(out.t_statistic),
                                   static_cast<unsigned>(fit.dof));
  out.p_value = std::min(1.0, out.p_value);
  return out;
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw DomainError("cholesky_lower: matrix is not square");
  if (!a.allFinite()) throw DomainError("cholesky_lower: non-finite entry");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(a(i, j) - a(j, i)) > 1e-10) {
        throw DomainError("cholesky_lower: matrix is not symmetric");
      }
    }
  }
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > 0.0)) {
      throw NotPositiveDefinite(
          "cholesky_lower: matrix is not positive definite (pivot " +
              std::to_string(j) + " = " + std::to_string(pivot) + ")",
          static_cast<std::size_t>(j), a);
    }
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / d;
    }
  }
  return l;
}

Eigen::MatrixXd sample_correlation_matrix(const Eigen::MatrixXd& columns) {
  const Eigen::Index n = columns.rows();
  const Eigen::Index m = columns.cols();
  if (n < 2) {
    throw InsufficientData("sample_correlation_matrix: need >= 2 observations");
  }
  Eigen::MatrixXd centered = columns.rowwise() - columns.colwise().mean();
  Eigen::VectorXd norms = centered.colwise().norm();
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!(norms(j) > 0.0)) {
      throw DegenerateColumn("sample_correlation_matrix: column " +
                             std::to_string(j) + " is constant");
    }
    centered.col(j) /= norms(j);
  }
  Eigen::MatrixXd c = centered.transpose() * centered;
  for (Eigen::Index i = 0; i < m; ++i) {
    c(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = std::clamp(0.5 * (c(i, j) + c(j, i)), -1.0, 1.0);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

Eigen::MatrixXd sample_correlation_matrix(
    std::span<const Eigen::VectorXd> columns) {
  if (columns.empty()) return Eigen::MatrixXd(0, 0);
  const Eigen::Index n = columns.front().size();
  Eigen::MatrixXd stacked(n, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != n) {
      throw DomainError("sample_correlation_matrix: columns differ in length");
    }
    stacked.col(static_cast<Eigen::Index>(j)) = columns[j];
  }
  return sample_correlation_matrix(stacked);
}

double sample_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw DomainError("sample_correlation: length mismatch");
  }
  Eigen::MatrixXd both(a.size(), 2);
  both.col(0) = a;
  both.col(1) = b;
  return sample_correlation_matrix(both)(0, 1);
}

}  // namespace copula_exo
