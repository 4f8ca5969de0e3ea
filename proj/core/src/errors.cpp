#include "copula_exo/errors.hpp"

namespace copula_exo {

namespace {

std::string located(const std::string& what, std::size_t row,
                    const std::string& column) {
  std::string out = what + " (row " + std::to_string(row);
  if (!column.empty()) out += ", column '" + column + "'";
  return out + ")";
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t row,
                       std::string column)
    : Error(ErrorCategory::data, located(what, row, column)),
      row_(row),
      column_(std::move(column)) {}

}  // namespace copula_exo
