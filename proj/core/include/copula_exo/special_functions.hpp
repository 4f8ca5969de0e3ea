#pragma once

namespace copula_exo {

/// Standard normal density.
double normal_pdf(double x) noexcept;

/// Standard normal CDF, Phi(x). Total on finite inputs.
double normal_cdf(double x) noexcept;

/// Upper tail 1 - Phi(x), computed without cancellation.
double normal_sf(double x) noexcept;

/// Phi^{-1}(p) for 0 < p < 1. Acklam's rational approximation followed by a
/// Halley refinement against normal_cdf. Throws DomainError outside (0, 1).
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double regularized_beta(double a, double b, double x);

/// Survival function of the chi-squared distribution with `df` degrees of
/// freedom. Throws DomainError for x < 0 or df == 0.
double chi_squared_sf(double x, unsigned df);

/// Survival function of Student's t with integer degrees of freedom.
double student_t_sf(double x, unsigned df);

/// Student's t CDF with real-valued df > 0.
double student_t_cdf(double x, double df);

}  // namespace copula_exo
