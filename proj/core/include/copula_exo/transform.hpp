#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "copula_exo/dataset.hpp"
#include "copula_exo/rng.hpp"

namespace copula_exo {

struct NormalScores {
  Eigen::VectorXd values;
  VariableKind source_kind = VariableKind::continuous;
  /// Stream id of the draw that produced discrete scores.
  std::optional<std::uint64_t> draw_id;
};

/// Phi^{-1}(F(x)) with F the rank / (T + 1) empirical CDF.
/// Throws InsufficientData for fewer than two values, DegenerateColumn when
/// all values are equal.
NormalScores normal_scores_continuous(std::span<const double> sample);
NormalScores normal_scores_continuous(const Eigen::VectorXd& sample);

/// Randomized scores for a discrete variable. With distinct values
/// a_1 < ... < a_n and sample CDF F, an observation equal to a_i receives
/// Phi^{-1}(u) with u uniform on (F(a_{i-1}), F(a_i)], F(a_0) = 0, so pooled
/// scores are exactly standard normal. Draws are taken in row order.
NormalScores normal_scores_discrete(std::span<const double> sample,
                                    RngStream& rng);
NormalScores normal_scores_discrete(const Eigen::VectorXd& sample,
                                    RngStream& rng);

/// Dispatch on kind; `rng` is only touched for discrete columns.
NormalScores normal_scores(const Eigen::VectorXd& sample, VariableKind kind,
                           RngStream& rng);

std::size_t count_distinct(std::span<const double> sample);

/// Suggests discrete when the number of distinct values is at most
/// max(20, 0.05 T). Advisory only; never overrides a declared kind.
VariableKind suggest_kind(std::span<const double> sample);

/// Residuals of P on [1, X, Z].
Eigen::VectorXd reduced_form_residuals(const Dataset& d);

}  // namespace copula_exo
