#include "copula_exo/dataset.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "copula_exo/errors.hpp"

namespace copula_exo {

const char* to_string(VariableKind kind) noexcept {
  return kind == VariableKind::discrete ? "discrete" : "continuous";
}

namespace {

void check_length(Eigen::Index t, std::size_t minimum) {
  if (static_cast<std::size_t>(t) < minimum) {
    throw InsufficientData("dataset has " + std::to_string(t) +
                           " observations; at least " +
                           std::to_string(minimum) + " are required");
  }
}

}  // namespace

void require_minimum_observations(const Dataset& d) {
  check_length(d.y.size(), kMinimumObservations);
}

void Dataset::validate(std::size_t minimum) {
  const Eigen::Index t = y.size();
  check_length(t, std::max<std::size_t>(minimum, 1));
  if (p.size() != t) throw InvalidDataset("endogenous column length differs from outcome");
  if (x_block.cols() > 0 && x_block.rows() != t) {
    throw InvalidDataset("exogenous block row count differs from outcome");
  }
  if (z_block.cols() > 0 && z_block.rows() != t) {
    throw InvalidDataset("instrument block row count differs from outcome");
  }
  if (x_block.cols() == 0) x_block.resize(t, 0);
  if (z_block.cols() == 0) z_block.resize(t, 0);

  if (x_labels.empty()) {
    for (std::size_t j = 0; j < k(); ++j) x_labels.push_back("x" + std::to_string(j + 1));
  }
  if (z_labels.empty()) {
    for (std::size_t j = 0; j < m(); ++j) z_labels.push_back("z" + std::to_string(j + 1));
  }
  if (z_kinds.empty()) z_kinds.assign(m(), VariableKind::continuous);
  if (x_labels.size() != k() || z_labels.size() != m() || z_kinds.size() != m()) {
    throw InvalidDataset("label or kind count does not match the column count");
  }

  std::set<std::string> seen{y_label};
  auto unique = [&seen](const std::string& label) {
    if (label.empty()) throw InvalidDataset("empty column label");
    if (!seen.insert(label).second) {
      throw InvalidDataset("duplicate column label '" + label + "'");
    }
  };
  if (y_label.empty()) throw InvalidDataset("empty column label");
  unique(p_label);
  for (const auto& l : x_labels) unique(l);
  for (const auto& l : z_labels) unique(l);

  if (!y.allFinite() || !p.allFinite() || !x_block.allFinite() ||
      !z_block.allFinite()) {
    throw InvalidDataset("dataset contains non-finite values");
  }
}

Eigen::MatrixXd design_with_intercept(
    Eigen::Index rows, std::initializer_list<const Eigen::MatrixXd*> blocks) {
  Eigen::Index cols = 1;
  for (const auto* b : blocks) cols += b->cols();
  Eigen::MatrixXd design(rows, cols);
  design.col(0).setOnes();
  Eigen::Index at = 1;
  for (const auto* b : blocks) {
    if (b->cols() == 0) continue;
    if (b->rows() != rows) {
      throw InvalidDataset("design block row count mismatch");
    }
    design.middleCols(at, b->cols()) = *b;
    at += b->cols();
  }
  return design;
}

}  // namespace copula_exo
