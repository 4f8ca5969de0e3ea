#include "copula_exo/table.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "copula_exo/errors.hpp"

namespace copula_exo {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string out = buf;
  // values that round to zero print without a sign
  if (out[0] == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Columns holding rejection rates (rendered as percentages in text).
std::size_t first_rate_column(const Table& t) {
  return t.layout == TableLayout::table1_style ? t.header.size() - (t.header.size() - 2) / 2
                                               : 3;
}

}  // namespace

Table emit_table(const std::vector<MonteCarloSummary>& summaries,
                 TableLayout layout) {
  if (summaries.empty()) throw LayoutMismatch("no summaries to tabulate");
  const ScenarioMode mode = layout == TableLayout::table1_style
                                ? ScenarioMode::instrument
                                : ScenarioMode::regressor;
  const std::size_t m = summaries.front().spec.m();
  std::set<std::size_t> sizes;
  std::set<std::size_t> reps;
  std::set<double> levels;
  for (const auto& s : summaries) {
    if (s.spec.mode != mode) {
      throw LayoutMismatch(std::string(to_string(layout)) +
                           " needs " +
                           (mode == ScenarioMode::instrument ? "instrument"
                                                             : "regressor") +
                           " scenarios; '" + s.spec.name + "' is not one");
    }
    if (layout == TableLayout::table1_style && s.spec.m() != m) {
      throw LayoutMismatch("summaries differ in their number of instruments");
    }
    if (layout == TableLayout::table3_style &&
        std::find(s.hypotheses.begin(), s.hypotheses.end(), "hausman") ==
            s.hypotheses.end()) {
      throw LayoutMismatch("'" + s.spec.name +
                           "' has no instrument for the Hausman column");
    }
    sizes.insert(s.spec.t);
    reps.insert(s.spec.n_reps);
    levels.insert(s.spec.alpha_level);
  }

  Table t;
  t.layout = layout;
  t.header.push_back("eps_distribution");
  if (layout == TableLayout::table1_style) {
    for (std::size_t i = 1; i <= m; ++i) {
      t.header.push_back("rho_z" + std::to_string(i) + "_eps_star");
    }
    t.header.push_back("rho_p_eps");
    for (std::size_t i = 1; i <= m; ++i) {
      t.header.push_back("reject_z" + std::to_string(i));
    }
  } else {
    t.header = {"eps_distribution", "rho_p_eps_star", "rho_p_eps",
                "reject_copula", "reject_hausman"};
  }

  for (const auto& s : summaries) {
    std::vector<std::string> row{s.spec.eps_marginal.label()};
    if (layout == TableLayout::table1_style) {
      for (Eigen::Index i = 0; i < s.spec.rho_z_eps.size(); ++i) {
        row.push_back(fixed(s.spec.rho_z_eps(i), 2));
      }
      row.push_back(fixed(s.mean_rho_p_eps, 2));
      for (std::size_t i = 0; i < m; ++i) {
        row.push_back(fixed(s.rejection_rates[i], 3));
      }
    } else {
      row.push_back(fixed(s.spec.rho_p_eps, 2));
      row.push_back(fixed(s.mean_rho_p_eps, 2));
      row.push_back(fixed(s.rate("copula"), 3));
      row.push_back(fixed(s.rate("hausman"), 3));
    }
    t.rows.push_back(std::move(row));
  }

  const auto join = [](const auto& values) {
    std::ostringstream os;
    bool first = true;
    for (const auto& v : values) {
      os << (first ? "" : "/") << v;
      first = false;
    }
    return os.str();
  };
  t.notes.push_back("T = " + join(sizes) + ", replications = " + join(reps) +
                    ", alpha = " + join(levels));
  return t;
}

std::string Table::to_csv() const {
  std::ostringstream os;
  for (std::size_t j = 0; j < header.size(); ++j) {
    os << (j ? "," : "") << csv_cell(header[j]);
  }
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      os << (j ? "," : "") << csv_cell(row[j]);
    }
    os << '\n';
  }
  return os.str();
}

std::string Table::to_text() const {
  const std::size_t rate_from = first_rate_column(*this);
  std::vector<std::vector<std::string>> cells;
  cells.push_back(header);
  std::string previous;
  for (const auto& row : rows) {
    std::vector<std::string> r = row;
    // Group rows by error distribution.
    if (r[0] == previous) {
      r[0].clear();
    } else {
      previous = r[0];
    }
    for (std::size_t j = rate_from; j < r.size(); ++j) {
      r[j] = fixed(100.0 * std::stod(row[j]), 0) + "%";
    }
    cells.push_back(std::move(r));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& r : cells) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      width[j] = std::max(width[j], r[j].size());
    }
  }
  std::ostringstream os;
  for (const auto& r : cells) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) os << "  ";
      if (j == 0) {
        os << r[j] << std::string(width[j] - r[j].size(), ' ');
      } else {
        os << std::string(width[j] - r[j].size(), ' ') << r[j];
      }
    }
    os << '\n';
  }
  for (const auto& n : notes) os << n << '\n';
  return os.str();
}

}  // namespace copula_exo
