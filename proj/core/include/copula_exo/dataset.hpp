#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace copula_exo {

enum class VariableKind { continuous, discrete };

const char* to_string(VariableKind kind) noexcept;

/// Observations for Y = b0 + X b + a P + e with instruments Z.
///
/// Columns are stored as Eigen blocks; `x_block` and `z_block` may have zero
/// columns. Kinds apply to P and to each instrument column.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd x_block;
  Eigen::VectorXd p;
  Eigen::MatrixXd z_block;

  VariableKind p_kind = VariableKind::continuous;
  std::vector<VariableKind> z_kinds;

  std::string y_label = "y";
  std::vector<std::string> x_labels;
  std::string p_label = "p";
  std::vector<std::string> z_labels;

  std::size_t observations() const noexcept {
    return static_cast<std::size_t>(y.size());
  }
  std::size_t k() const noexcept {
    return static_cast<std::size_t>(x_block.cols());
  }
  std::size_t m() const noexcept {
    return static_cast<std::size_t>(z_block.cols());
  }

  /// Fills missing labels (x1.., z1..) and kinds (continuous), then checks
  /// shapes, T >= minimum, finiteness and label uniqueness. Throws
  /// InsufficientData for short data and InvalidDataset otherwise.
  void validate(std::size_t minimum = 10);
};

inline constexpr std::size_t kMinimumObservations = 10;

/// Throws InsufficientData when d has fewer than kMinimumObservations rows.
void require_minimum_observations(const Dataset& d);

/// [1, blocks...] column-wise; every block must have `rows` rows.
Eigen::MatrixXd design_with_intercept(
    Eigen::Index rows, std::initializer_list<const Eigen::MatrixXd*> blocks);

}  // namespace copula_exo
