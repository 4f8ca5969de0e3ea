#pragma once

#include <string>
#include <vector>

#include "copula_exo/scenario.hpp"
#include "copula_exo/simlab.hpp"

namespace copula_exo {

struct Table {
  TableLayout layout = TableLayout::table1_style;
  std::vector<std::string> header;
  /// Cells as plain numbers (rates as fractions), one row per summary.
  std::vector<std::vector<std::string>> rows;
  /// Trailing notes (sample size, replications, level).
  std::vector<std::string> notes;

  std::string to_csv() const;
  /// Aligned columns, rates shown as percentages, rows grouped by error
  /// distribution.
  std::string to_text() const;
};

/// table1_style: error distribution, rho_Zi*eps* for each instrument, mean
/// rho_P,eps, then one rejection column per instrument. table3_style: error
/// distribution, rho_P*eps*, mean rho_P,eps, copula and Hausman rejection.
/// Throws LayoutMismatch for an empty list, a summary of the wrong mode, or
/// instrument counts that differ between summaries.
Table emit_table(const std::vector<MonteCarloSummary>& summaries,
                 TableLayout layout);

}  // namespace copula_exo
