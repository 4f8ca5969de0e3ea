#include "copula_exo/transform.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "copula_exo/errors.hpp"
#include "copula_exo/marginals.hpp"
#include "copula_exo/regress.hpp"
#include "copula_exo/special_functions.hpp"

namespace copula_exo {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void require_nondegenerate(std::span<const double> sample, const char* who) {
  if (sample.size() < 2) {
    throw InsufficientData(std::string(who) + ": need at least two values");
  }
  const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
  if (!std::isfinite(*lo) || !std::isfinite(*hi)) {
    throw DomainError(std::string(who) + ": non-finite value");
  }
  if (*lo == *hi) {
    throw DegenerateColumn(std::string(who) + ": all values are equal");
  }
}

}  // namespace

NormalScores normal_scores_continuous(std::span<const double> sample) {
  require_nondegenerate(sample, "normal_scores_continuous");
  const EmpiricalCdf cdf(sample);
  NormalScores out;
  out.values.resize(static_cast<Eigen::Index>(sample.size()));
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out.values(static_cast<Eigen::Index>(i)) = normal_quantile(cdf(sample[i]));
  }
  return out;
}

NormalScores normal_scores_continuous(const Eigen::VectorXd& sample) {
  return normal_scores_continuous(as_span(sample));
}

NormalScores normal_scores_discrete(std::span<const double> sample,
                                    RngStream& rng) {
  require_nondegenerate(sample, "normal_scores_discrete");
  std::vector<double> levels(sample.begin(), sample.end());
  std::sort(levels.begin(), levels.end());
  // upper[i] = F(a_i) = #{x <= a_i} / T over the distinct levels.
  std::vector<double> distinct;
  std::vector<double> upper;
  const double t = static_cast<double>(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i + 1 == levels.size() || levels[i + 1] != levels[i]) {
      distinct.push_back(levels[i]);
      upper.push_back(static_cast<double>(i + 1) / t);
    }
  }
  upper.back() = 1.0;

  NormalScores out;
  out.source_kind = VariableKind::discrete;
  out.draw_id = rng.stream_id();
  out.values.resize(static_cast<Eigen::Index>(sample.size()));
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto cell = static_cast<std::size_t>(
        std::lower_bound(distinct.begin(), distinct.end(), sample[i]) -
        distinct.begin());
    const double lo = cell == 0 ? 0.0 : upper[cell - 1];
    out.values(static_cast<Eigen::Index>(i)) =
        normal_quantile(rng.uniform(lo, upper[cell]));
  }
  return out;
}

NormalScores normal_scores_discrete(const Eigen::VectorXd& sample,
                                    RngStream& rng) {
  return normal_scores_discrete(as_span(sample), rng);
}

NormalScores normal_scores(const Eigen::VectorXd& sample, VariableKind kind,
                           RngStream& rng) {
  return kind == VariableKind::discrete ? normal_scores_discrete(sample, rng)
                                        : normal_scores_continuous(sample);
}

std::size_t count_distinct(std::span<const double> sample) {
  std::vector<double> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

VariableKind suggest_kind(std::span<const double> sample) {
  const double limit =
      std::max(20.0, 0.05 * static_cast<double>(sample.size()));
  return static_cast<double>(count_distinct(sample)) <= limit
             ? VariableKind::discrete
             : VariableKind::continuous;
}

Eigen::VectorXd reduced_form_residuals(const Dataset& d) {
  const Eigen::MatrixXd design = design_with_intercept(
      static_cast<Eigen::Index>(d.observations()), {&d.x_block, &d.z_block});
  return ols_fit(design, d.p).residuals;
}

}  // namespace copula_exo
