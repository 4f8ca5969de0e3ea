#include "copula_exo/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "copula_exo/errors.hpp"

namespace copula_exo {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kSqrt2Pi = 2.50662827463100050242;


// Acklam's coefficients for the central and tail regions.
constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                        -2.759285104469687e+02, 1.383577518672690e+02,
                        -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                        -1.556989798598866e+02, 6.680131188771972e+01,
                        -1.328068155288572e+01};
constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                        -2.400758277161838e+00, -2.549732539343734e+00,
                        4.374664141464968e+00,  2.938163982698783e+00};
constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                        2.445134137142996e+00, 3.754408661907416e+00};

constexpr double kLow = 0.02425;

// Lower-half quantile, p <= 0.5.
double lower_quantile(double p) {
  double x;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  // Halley step. The residual is taken relative to the density so it stays
  // accurate deep in the tail where p itself is tiny.
  const double e = normal_cdf(x) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace

double normal_pdf(double x) noexcept {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x * kInvSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal_quantile: p must lie in (0, 1), got " +
                      std::to_string(p));
  }
  if (p == 0.5) return 0.0;
  // 1 - p is exact for p >= 0.5, so reflecting keeps the function odd about
  // one half and monotone.
  if (p > 0.5) return -lower_quantile(1.0 - p);
  return lower_quantile(p);
}

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || std::isnan(x)) {
    throw DomainError("regularized_gamma_p: need a > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || std::isnan(x)) {
    throw DomainError("regularized_gamma_q: need a > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(a, x);
}

double regularized_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw DomainError("regularized_beta: need a, b > 0 and x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

double chi_squared_sf(double x, unsigned df) {
  if (df == 0) throw DomainError("chi_squared_sf: df must be positive");
  if (!(x >= 0.0)) {
    throw DomainError("chi_squared_sf: statistic must be nonnegative");
  }
  if (df == 2) return std::exp(-0.5 * x);
  if (df == 1) return std::erfc(std::sqrt(0.5 * x));
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

double student_t_cdf(double x, double df) {
  if (!(df > 0.0)) throw DomainError("student_t_cdf: df must be positive");
  if (std::isnan(x)) throw DomainError("student_t_cdf: x is NaN");
  if (x == 0.0) return 0.5;
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  // Tail mass below -|x| via I_{df/(df+x^2)}(df/2, 1/2) / 2. Written with
  // x^2 / df to avoid overflow for huge |x|.
  const double t = x * x / df;
  double tail;
  if (t < 1.0) {
    // Near the center the complementary form keeps more digits.
    tail = 0.5 - 0.5 * regularized_beta(0.5, 0.5 * df, t / (1.0 + t));
  } else {
    tail = 0.5 * regularized_beta(0.5 * df, 0.5, 1.0 / (1.0 + t));
  }
  return x > 0 ? 1.0 - tail : tail;
}

double student_t_sf(double x, unsigned df) {
  if (df == 0) throw DomainError("student_t_sf: df must be positive");
  return student_t_cdf(-x, static_cast<double>(df));
}

}  // namespace copula_exo
