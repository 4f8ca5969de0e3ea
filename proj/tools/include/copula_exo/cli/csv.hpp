#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace copula_exo::cli {

/// Raw RFC-4180 table: a header and string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header; throws MissingColumn.
  std::size_t column(const std::string& name) const;
};

/// Parses quoted fields (with "" escapes and embedded line breaks), CRLF or
/// LF line endings, and a leading UTF-8 byte order mark. Throws ParseError
/// for unterminated quotes or ragged rows.
CsvTable parse_csv(const std::string& text);

/// Throws FileNotFound.
CsvTable read_csv(const std::string& path);

/// Strict decimal real (surrounding blanks allowed). Throws ParseError with
/// the given coordinates for empty, malformed or non-finite cells.
double parse_real(const std::string& cell, std::size_t row,
                  const std::string& column);

}  // namespace copula_exo::cli
