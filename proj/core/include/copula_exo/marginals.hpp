#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "copula_exo/rng.hpp"

namespace copula_exo {

/// Empirical CDF with the rank / (T + 1) plotting convention.
///
/// F(x) = #{sample <= x} / (T + 1), so tied observations share the score of
/// the tie group's maximum rank and observed points never map to 0 or 1.
class EmpiricalCdf {
 public:
  /// Throws EmptyInput for an empty sample, DomainError for non-finite values.
  explicit EmpiricalCdf(std::span<const double> sample);

  double operator()(double x) const noexcept;

  /// Generalized inverse inf{x : F(x) >= p}, clamped to the sample range.
  double quantile(double p) const;

  std::size_t size() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted_values() const noexcept { return sorted_; }

  /// Mean and standard deviation of the sample (divisor T).
  double mean() const noexcept { return mean_; }
  double stddev() const noexcept { return stddev_; }

  /// Points v where quantile(Phi(v)) jumps, i.e. Phi^{-1}(k / (T + 1)) for
  /// each k at which the sorted sample changes value.
  std::vector<double> normal_breakpoints() const;

 private:
  std::vector<double> sorted_;
  double mean_ = 0.0;
  double stddev_ = 0.0;
};

EmpiricalCdf fit_empirical(std::span<const double> sample);

/// Inverse of the regularized incomplete beta in x.
double inverse_regularized_beta(double a, double b, double p);

enum class MarginalFamily {
  normal,
  student_t,
  uniform,
  exponential,
  beta,
  empirical
};

/// Univariate marginal distribution: CDF, quantile and moments.
///
/// Immutable after construction and cheap to copy (an empirical marginal
/// shares its sample).
class Marginal {
 public:
  struct Normal {
    double mean;
    double sd;
  };
  struct StudentT {
    double df;
  };
  struct Uniform {
    double lo;
    double hi;
  };
  struct Exponential {
    double rate;
  };
  struct Beta {
    double shape1;
    double shape2;
  };
  using Empirical = std::shared_ptr<const EmpiricalCdf>;
  using Family =
      std::variant<Normal, StudentT, Uniform, Exponential, Beta, Empirical>;

  static Marginal normal(double mean = 0.0, double sd = 1.0);
  static Marginal student_t(double df);
  static Marginal uniform(double lo, double hi);
  static Marginal exponential(double rate);
  static Marginal beta(double shape1, double shape2);
  static Marginal empirical(EmpiricalCdf cdf);

  MarginalFamily family() const noexcept;

  double cdf(double x) const;
  /// Throws DomainError when p is outside [0, 1], or at p in {0, 1} for a
  /// family unbounded on that side.
  double quantile(double p) const;
  /// quantile(Phi(v)), evaluated through the upper tail for v > 0 so that it
  /// stays accurate where Phi(v) rounds to one.
  double quantile_from_normal(double v) const;

  double mean() const;
  /// +infinity for Student-t with df <= 2.
  double stddev() const;
  bool has_finite_variance() const;

  /// Short label in the style N(0,1), t(2), U(-0.5,0.5), EXP(1), BETA(a,b).
  std::string label() const;

  /// Draw by inversion.
  double draw(RngStream& rng) const { return quantile(rng.uniform()); }

  const EmpiricalCdf* empirical_cdf() const noexcept;
  const Family& parameters() const noexcept { return family_; }

  friend bool operator==(const Marginal& a, const Marginal& b);

 private:
  explicit Marginal(Family family) : family_(std::move(family)) {}

  /// Quantile at 1 - q without forming 1 - q.
  double upper_quantile(double q) const;

  Family family_;
};

/// JSON form: {"family": "normal", "mean": 0, "sd": 1}, {"family":
/// "student_t", "df": 2}, {"family": "uniform", "lo": a, "hi": b},
/// {"family": "exponential", "rate": r}, {"family": "beta", "shape1": a,
/// "shape2": b}. Empirical marginals are not serializable.
nlohmann::json marginal_to_json(const Marginal& m);
Marginal marginal_from_json(const nlohmann::json& j);

}  // namespace copula_exo
