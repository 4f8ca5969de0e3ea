#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace copula_exo {

/// Coarse classification used by front ends to pick an exit status.
enum class ErrorCategory { usage, data, numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

// ---- numerical ------------------------------------------------------------

/// Argument outside the mathematical domain of a function (p <= 0 in a
/// quantile, negative chi-squared statistic, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCategory::numerical, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorCategory::numerical, what) {}
};

class RankDeficient : public Error {
 public:
  RankDeficient(const std::string& what, std::optional<std::size_t> column)
      : Error(ErrorCategory::numerical, what), column_(column) {}

  /// Design column judged linearly dependent on the others, when known.
  std::optional<std::size_t> column() const noexcept { return column_; }

 private:
  std::optional<std::size_t> column_;
};

class NearCollinear : public Error {
 public:
  NearCollinear(const std::string& what, double correlation)
      : Error(ErrorCategory::numerical, what), correlation_(correlation) {}

  double correlation() const noexcept { return correlation_; }

 private:
  double correlation_;
};

class SingularRestriction : public Error {
 public:
  SingularRestriction(const std::string& what, double condition_number)
      : Error(ErrorCategory::numerical, what),
        condition_number_(condition_number) {}

  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& what, std::size_t pivot,
                      Eigen::MatrixXd matrix = {})
      : Error(ErrorCategory::numerical, what),
        pivot_(pivot),
        matrix_(std::move(matrix)) {}

  /// Zero-based index of the first non-positive pivot.
  std::size_t pivot() const noexcept { return pivot_; }
  /// Offending matrix, attached by callers that assemble it themselves.
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

 private:
  std::size_t pivot_;
  Eigen::MatrixXd matrix_;
};

class InfiniteVariance : public Error {
 public:
  explicit InfiniteVariance(const std::string& what)
      : Error(ErrorCategory::numerical, what) {}
};

// ---- data -----------------------------------------------------------------

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

class DegenerateColumn : public Error {
 public:
  explicit DegenerateColumn(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

class InvalidDataset : public Error {
 public:
  explicit InvalidDataset(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

class NotApplicableDiscrete : public Error {
 public:
  explicit NotApplicableDiscrete(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

class LayoutMismatch : public Error {
 public:
  explicit LayoutMismatch(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

class FileNotFound : public Error {
 public:
  explicit FileNotFound(const std::string& path)
      : Error(ErrorCategory::data, "file not found: " + path), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class ParseError : public Error {
 public:
  /// `row` is the 1-based record number in the file (header = 1); `column`
  /// is the header name, empty when the error is not tied to one column.
  ParseError(const std::string& what, std::size_t row, std::string column);

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class MissingColumn : public Error {
 public:
  explicit MissingColumn(const std::string& name)
      : Error(ErrorCategory::data, "missing column: " + name), name_(name) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// ---- usage ----------------------------------------------------------------

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what)
      : Error(ErrorCategory::usage, what) {}
};

}  // namespace copula_exo
