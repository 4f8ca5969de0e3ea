#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "copula_exo/dataset.hpp"

namespace copula_exo::cli {

enum class Command { test_instruments, test_regressor, hausman, simulate, factor };
enum class OutputFormat { text, json, csv };

const char* to_string(Command c) noexcept;
const char* to_string(OutputFormat f) noexcept;

struct RunConfig {
  Command command = Command::test_instruments;

  std::string data_path;
  std::string outcome;
  std::string endogenous;
  std::vector<std::string> exogenous;
  std::vector<std::string> instruments;
  std::vector<std::string> discrete;

  /// Defaults to 0.05; for `simulate` an explicit value overrides the
  /// scenario file.
  std::optional<double> alpha;
  std::size_t draws = 100;
  /// Defaults to 42; for `simulate` an explicit value overrides the file.
  std::optional<std::uint64_t> seed;
  OutputFormat format = OutputFormat::text;

  std::string scenario_path;
  std::optional<std::size_t> reps;

  /// Marginal for `factor`, in the library's JSON form.
  nlohmann::json marginal;

  double effective_alpha() const { return alpha.value_or(0.05); }
  std::uint64_t effective_seed() const { return seed.value_or(42); }
};

nlohmann::json config_to_json(const RunConfig& config);
/// Inverse of config_to_json. Throws UsageError.
RunConfig config_from_json(const nlohmann::json& j);

/// Parses argv (argv[0] is the program name). Returns nullopt after printing
/// help or version to `out`. Throws UsageError on invalid arguments.
std::optional<RunConfig> parse_args(int argc, const char* const* argv,
                                    std::ostream& out);

/// Builds the dataset for the test commands. Throws FileNotFound,
/// MissingColumn, ParseError (row and column of the offending cell) and
/// UsageError when role lists overlap.
Dataset ingest_csv(const std::string& path, const RunConfig& config);

/// Columns declared continuous that have at most two distinct values.
std::vector<std::string> dummy_warnings(const Dataset& d);

struct RunResult {
  /// Top-level document: tool, version, command, seed, timestamp, config,
  /// result, warnings.
  nlohmann::json document;
  /// Rendering in the requested format.
  std::string rendered;
  std::vector<std::string> warnings;
};

/// Executes a validated configuration. Throws copula_exo::Error subclasses.
RunResult run(const RunConfig& config);

/// 0 success, 2 usage, 3 data, 4 numerical.
int exit_code_for(const std::exception& e) noexcept;

/// Full front end: parse, run, print. Diagnostics go to `err`.
int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err);

}  // namespace copula_exo::cli
