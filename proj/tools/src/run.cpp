#include "copula_exo/cli/run.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "copula_exo/cli/csv.hpp"
#include "copula_exo/errors.hpp"
#include "copula_exo/exo_test.hpp"
#include "copula_exo/marginals.hpp"
#include "copula_exo/rng.hpp"
#include "copula_exo/scenario.hpp"
#include "copula_exo/simlab.hpp"
#include "copula_exo/table.hpp"
#include "copula_exo/transform.hpp"
#include "copula_exo/version.hpp"

namespace copula_exo::cli {

using nlohmann::json;

namespace {

constexpr std::pair<Command, const char*> kCommands[] = {
    {Command::test_instruments, "test-instruments"},
    {Command::test_regressor, "test-regressor"},
    {Command::hausman, "hausman"},
    {Command::simulate, "simulate"},
    {Command::factor, "factor"},
};

Command command_from(const std::string& s) {
  for (const auto& [c, name] : kCommands) {
    if (s == name) return c;
  }
  throw UsageError("unknown command '" + s + "'");
}

OutputFormat format_from(const std::string& s) {
  if (s == "text") return OutputFormat::text;
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  throw UsageError("unknown output format '" + s + "'");
}

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

json nullable(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json wald_json(const WaldOutcome& w, double alpha) {
  return {{"statistic", w.statistic},
          {"df", w.df},
          {"p_value", w.p_value},
          {"rejected", w.rejects(alpha)},
          {"restriction", w.description}};
}

json coefficient_json(const CoefficientTest& c) {
  return {{"estimate", c.estimate},
          {"standard_error", c.standard_error},
          {"t_statistic", c.t_statistic},
          {"p_value", c.p_value}};
}

json report_json(const ExogeneityReport& r, std::size_t observations) {
  json columns = json::array();
  for (const auto& c : r.columns) {
    columns.push_back({{"label", c.label},
                       {"kind", to_string(c.kind)},
                       {"rho_star", c.rho_star},
                       {"mean_rho_star", c.mean_rho_star},
                       {"rho_star_out_of_range", c.rho_star_out_of_range},
                       {"rho_raw", nullable(c.rho_raw)},
                       {"rho_raw_out_of_range", c.rho_raw_out_of_range},
                       {"wald", wald_json(c.wald, r.alpha_level)},
                       {"rejection_frequency", c.rejection_frequency}});
  }
  json fit;
  fit["labels"] = r.design_labels;
  std::vector<double> coef(r.augmented_fit.coefficients.data(),
                           r.augmented_fit.coefficients.data() +
                               r.augmented_fit.coefficients.size());
  std::vector<double> se;
  for (std::size_t j = 0; j < r.augmented_fit.parameters(); ++j) {
    se.push_back(r.augmented_fit.standard_error(j));
  }
  fit["coefficients"] = coef;
  fit["standard_errors"] = se;
  fit["rmse"] = r.augmented_fit.rmse;
  fit["dof"] = r.augmented_fit.dof;

  json joint = wald_json(r.joint, r.alpha_level);
  joint["rejection_frequency"] = r.joint_rejection_frequency;
  return {{"test", r.kind == TestKind::instrument ? "instrument" : "regressor"},
          {"observations", observations},
          {"alpha", r.alpha_level},
          {"n_discrete_draws", r.n_discrete_draws},
          {"columns", columns},
          {"joint", joint},
          {"eta_star_test", r.eta_star_test ? coefficient_json(*r.eta_star_test)
                                            : json(nullptr)},
          {"augmented_fit", fit},
          {"notes", r.notes}};
}

std::string render_report_text(const ExogeneityReport& r,
                               std::size_t observations) {
  std::ostringstream os;
  const bool repeated = r.n_discrete_draws > 1;
  os << (r.kind == TestKind::instrument ? "Instrument" : "Regressor")
     << " exogeneity test (T = " << observations
     << ", alpha = " << num(r.alpha_level) << ")\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %-10s %10s %10s %11s %3s %11s %7s%s\n",
                "column", "kind", "rho*", "rho", "wald", "df", "p-value",
                "reject", repeated ? "  freq" : "");
  os << line;
  for (const auto& c : r.columns) {
    std::snprintf(line, sizeof line,
                  "%-14s %-10s %10s %10s %11s %3u %11s %7s", c.label.c_str(),
                  to_string(c.kind), num(c.rho_star, 4).c_str(),
                  c.rho_raw ? num(*c.rho_raw, 4).c_str() : "-",
                  num(c.wald.statistic, 5).c_str(), c.wald.df,
                  num(c.wald.p_value, 4).c_str(),
                  c.wald.rejects(r.alpha_level) ? "yes" : "no");
    os << line;
    if (repeated) os << "  " << num(c.rejection_frequency, 3);
    if (c.rho_star_out_of_range || c.rho_raw_out_of_range) os << "  (out of range)";
    os << '\n';
  }
  std::snprintf(line, sizeof line, "%-14s %-10s %10s %10s %11s %3u %11s %7s",
                "joint", "", "", "", num(r.joint.statistic, 5).c_str(),
                r.joint.df, num(r.joint.p_value, 4).c_str(),
                r.joint.rejects(r.alpha_level) ? "yes" : "no");
  os << line;
  if (repeated) os << "  " << num(r.joint_rejection_frequency, 3);
  os << '\n';
  if (r.eta_star_test) {
    os << "eta* coefficient " << num(r.eta_star_test->estimate, 5)
       << " (t = " << num(r.eta_star_test->t_statistic, 4)
       << ", p = " << num(r.eta_star_test->p_value, 4) << ")\n";
  }
  os << "rmse " << num(r.augmented_fit.rmse, 6) << ", dof "
     << r.augmented_fit.dof << '\n';
  for (const auto& n : r.notes) os << "note: " << n << '\n';
  return os.str();
}

std::string render_report_csv(const ExogeneityReport& r) {
  std::ostringstream os;
  os << "column,kind,rho_star,rho_raw,statistic,df,p_value,rejected,"
        "rejection_frequency\n";
  for (const auto& c : r.columns) {
    os << c.label << ',' << to_string(c.kind) << ',' << num(c.rho_star, 12)
       << ',' << (c.rho_raw ? num(*c.rho_raw, 12) : "") << ','
       << num(c.wald.statistic, 12) << ',' << c.wald.df << ','
       << num(c.wald.p_value, 12) << ','
       << (c.wald.rejects(r.alpha_level) ? 1 : 0) << ','
       << num(c.rejection_frequency, 12) << '\n';
  }
  os << "joint,,,," << num(r.joint.statistic, 12) << ',' << r.joint.df << ','
     << num(r.joint.p_value, 12) << ','
     << (r.joint.rejects(r.alpha_level) ? 1 : 0) << ','
     << num(r.joint_rejection_frequency, 12) << '\n';
  return os.str();
}

void require_roles(const RunConfig& c, bool need_instruments) {
  if (c.data_path.empty()) throw UsageError("--data is required");
  if (c.outcome.empty()) throw UsageError("--outcome is required");
  if (c.endogenous.empty()) throw UsageError("--endogenous is required");
  if (need_instruments && c.instruments.empty()) {
    throw UsageError("at least one --instrument is required");
  }
}

}  // namespace

const char* to_string(Command c) noexcept {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "?";
}

const char* to_string(OutputFormat f) noexcept {
  switch (f) {
    case OutputFormat::json:
      return "json";
    case OutputFormat::csv:
      return "csv";
    default:
      return "text";
  }
}

json config_to_json(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  j["data"] = c.data_path.empty() ? json(nullptr) : json(c.data_path);
  j["outcome"] = c.outcome.empty() ? json(nullptr) : json(c.outcome);
  j["endogenous"] = c.endogenous.empty() ? json(nullptr) : json(c.endogenous);
  j["exogenous"] = c.exogenous;
  j["instruments"] = c.instruments;
  j["discrete"] = c.discrete;
  j["alpha"] = nullable(c.alpha);
  j["draws"] = c.draws;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["format"] = to_string(c.format);
  j["scenario"] = c.scenario_path.empty() ? json(nullptr) : json(c.scenario_path);
  j["reps"] = c.reps ? json(*c.reps) : json(nullptr);
  j["marginal"] = c.marginal.is_null() ? json(nullptr) : c.marginal;
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  try {
    c.command = command_from(j.at("command").get<std::string>());
    const auto str = [&j](const char* key) {
      return j.contains(key) && !j[key].is_null() ? j[key].get<std::string>()
                                                  : std::string();
    };
    const auto list = [&j](const char* key) {
      return j.contains(key) && !j[key].is_null()
                 ? j[key].get<std::vector<std::string>>()
                 : std::vector<std::string>();
    };
    c.data_path = str("data");
    c.outcome = str("outcome");
    c.endogenous = str("endogenous");
    c.exogenous = list("exogenous");
    c.instruments = list("instruments");
    c.discrete = list("discrete");
    if (j.contains("alpha") && !j["alpha"].is_null()) c.alpha = j["alpha"].get<double>();
    if (j.contains("draws")) c.draws = j["draws"].get<std::size_t>();
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("format")) c.format = format_from(j["format"].get<std::string>());
    c.scenario_path = str("scenario");
    if (j.contains("reps") && !j["reps"].is_null()) c.reps = j["reps"].get<std::size_t>();
    if (j.contains("marginal")) c.marginal = j["marginal"];
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed config: ") + e.what());
  }
  return c;
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv,
                                    std::ostream& out) {
  CLI::App app{"Copula-based exogeneity tests for instruments and regressors",
               "copula-exo"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig c;
  std::string format = "text";
  double alpha = 0.05;
  std::uint64_t seed = 42;
  std::size_t reps = 0;

  std::string family;
  double mean = 0.0, sd = 1.0, df = 0.0, lo = 0.0, hi = 0.0, rate = 1.0,
         shape1 = 0.0, shape2 = 0.0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--alpha", alpha, "significance level")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--format", format, "text, json or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
  };
  const auto add_data = [&](CLI::App* sub, bool instruments) {
    sub->add_option("--data", c.data_path, "CSV file with a header row")
        ->required();
    sub->add_option("--outcome", c.outcome, "outcome column")->required();
    sub->add_option("--endogenous", c.endogenous, "endogenous column")
        ->required();
    sub->add_option("--exogenous", c.exogenous, "exogenous column (repeatable)")
        ->take_all();
    auto* inst = sub->add_option("--instrument", c.instruments,
                                 "instrument column (repeatable)")
                     ->take_all();
    if (instruments) inst->required();
    sub->add_option("--discrete", c.discrete,
                    "treat the column as discrete (repeatable)")
        ->take_all();
    sub->add_option("--draws", c.draws, "re-draws for discrete columns")
        ->check(CLI::PositiveNumber);
    add_common(sub);
  };

  auto* ti = app.add_subcommand("test-instruments", "instrument exogeneity test");
  add_data(ti, true);
  auto* tr = app.add_subcommand("test-regressor",
                                "instrument-free regressor exogeneity test");
  add_data(tr, false);
  auto* ha = app.add_subcommand("hausman", "control-function Hausman test");
  add_data(ha, true);
  auto* si = app.add_subcommand("simulate", "run a scenario sweep");
  si->add_option("--scenario", c.scenario_path, "scenario sweep JSON file")
      ->required();
  si->add_option("--reps", reps, "replications per scenario")
      ->check(CLI::PositiveNumber);
  add_common(si);
  auto* fa = app.add_subcommand("factor", "correlation factor of a marginal");
  fa->add_option("--marginal", family, "normal, student_t, uniform, exponential, beta")
      ->required()
      ->check(CLI::IsMember({"normal", "student_t", "uniform", "exponential", "beta"}));
  auto* o_mean = fa->add_option("--mean", mean, "normal mean");
  auto* o_sd = fa->add_option("--sd", sd, "normal standard deviation");
  auto* o_df = fa->add_option("--df", df, "Student-t degrees of freedom");
  auto* o_lo = fa->add_option("--lo", lo, "uniform lower bound");
  auto* o_hi = fa->add_option("--hi", hi, "uniform upper bound");
  auto* o_rate = fa->add_option("--rate", rate, "exponential rate");
  auto* o_s1 = fa->add_option("--shape1", shape1, "beta first shape");
  auto* o_s2 = fa->add_option("--shape2", shape2, "beta second shape");
  fa->add_option("--format", format, "text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  CLI::App* chosen = app.get_subcommands().front();
  c.command = command_from(chosen->get_name());
  c.format = format_from(format);
  const auto given = [chosen](const char* name) {
    const CLI::Option* o = chosen->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  if (given("--alpha")) c.alpha = alpha;
  if (given("--seed")) c.seed = seed;
  if (given("--reps")) c.reps = reps;
  if (c.command == Command::factor) {
    json m{{"family", family}};
    const auto put = [&m](CLI::Option* o, const char* key, double v) {
      if (o->count() > 0) m[key] = v;
    };
    put(o_mean, "mean", mean);
    put(o_sd, "sd", sd);
    put(o_df, "df", df);
    put(o_lo, "lo", lo);
    put(o_hi, "hi", hi);
    put(o_rate, "rate", rate);
    put(o_s1, "shape1", shape1);
    put(o_s2, "shape2", shape2);
    c.marginal = m;
  }
  return c;
}

Dataset ingest_csv(const std::string& path, const RunConfig& config) {
  std::set<std::string> seen;
  const auto claim = [&seen](const std::string& name) {
    if (!seen.insert(name).second) {
      throw UsageError("column '" + name + "' is assigned to more than one role");
    }
  };
  claim(config.outcome);
  claim(config.endogenous);
  for (const auto& n : config.exogenous) claim(n);
  for (const auto& n : config.instruments) claim(n);
  for (const auto& n : config.discrete) {
    const bool known =
        n == config.endogenous ||
        std::find(config.instruments.begin(), config.instruments.end(), n) !=
            config.instruments.end();
    if (!known) {
      throw UsageError("--discrete " + n +
                       " must name the endogenous column or an instrument");
    }
  }

  const CsvTable table = read_csv(path);
  const auto rows = static_cast<Eigen::Index>(table.rows.size());
  // Resolve every role before touching cells so that a missing column is
  // reported ahead of parse problems.
  const std::size_t y_col = table.column(config.outcome);
  const std::size_t p_col = table.column(config.endogenous);
  std::vector<std::size_t> x_cols, z_cols;
  for (const auto& n : config.exogenous) x_cols.push_back(table.column(n));
  for (const auto& n : config.instruments) z_cols.push_back(table.column(n));

  const auto read = [&](std::size_t col) {
    Eigen::VectorXd v(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      v(r) = parse_real(table.rows[static_cast<std::size_t>(r)][col],
                        static_cast<std::size_t>(r) + 2, table.header[col]);
    }
    return v;
  };

  Dataset d;
  d.y = read(y_col);
  d.y_label = config.outcome;
  d.p = read(p_col);
  d.p_label = config.endogenous;
  const auto is_discrete = [&config](const std::string& n) {
    return std::find(config.discrete.begin(), config.discrete.end(), n) !=
           config.discrete.end();
  };
  d.p_kind = is_discrete(config.endogenous) ? VariableKind::discrete
                                            : VariableKind::continuous;
  d.x_block.resize(rows, static_cast<Eigen::Index>(x_cols.size()));
  for (std::size_t j = 0; j < x_cols.size(); ++j) {
    d.x_block.col(static_cast<Eigen::Index>(j)) = read(x_cols[j]);
  }
  d.x_labels = config.exogenous;
  d.z_block.resize(rows, static_cast<Eigen::Index>(z_cols.size()));
  for (std::size_t j = 0; j < z_cols.size(); ++j) {
    d.z_block.col(static_cast<Eigen::Index>(j)) = read(z_cols[j]);
    d.z_kinds.push_back(is_discrete(config.instruments[j])
                            ? VariableKind::discrete
                            : VariableKind::continuous);
  }
  d.z_labels = config.instruments;
  // The observation minimum is enforced by the tests themselves.
  d.validate(1);
  return d;
}

std::vector<std::string> dummy_warnings(const Dataset& d) {
  std::vector<std::string> out;
  const auto check = [&out](const Eigen::VectorXd& v, VariableKind kind,
                            const std::string& label) {
    if (kind != VariableKind::continuous) return;
    const std::size_t distinct = count_distinct(
        std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
    if (distinct <= 2) {
      out.push_back("column '" + label + "' has " + std::to_string(distinct) +
                    " distinct values; consider --discrete " + label);
    }
  };
  check(d.p, d.p_kind, d.p_label);
  for (std::size_t j = 0; j < d.m(); ++j) {
    check(d.z_block.col(static_cast<Eigen::Index>(j)), d.z_kinds[j],
          d.z_labels[j]);
  }
  return out;
}

RunResult run(const RunConfig& config) {
  RunResult out;
  json result;
  json timing = json::object();
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream text;
  std::ostringstream csv;

  switch (config.command) {
    case Command::test_instruments:
    case Command::test_regressor: {
      const bool instruments = config.command == Command::test_instruments;
      require_roles(config, instruments);
      const Dataset d = ingest_csv(config.data_path, config);
      out.warnings = dummy_warnings(d);
      TestOptions options;
      options.alpha = config.effective_alpha();
      options.n_draws = config.draws;
      RngStream rng(config.effective_seed(),
                    hash_bytes(to_string(config.command)));
      const ExogeneityReport report =
          instruments ? instrument_exogeneity_test(d, options, rng)
                      : regressor_exogeneity_test(d, options, rng);
      result = report_json(report, d.observations());
      text << render_report_text(report, d.observations());
      csv << render_report_csv(report);
      break;
    }
    case Command::hausman: {
      require_roles(config, true);
      const Dataset d = ingest_csv(config.data_path, config);
      const HausmanResult h = hausman_test(d, config.effective_alpha());
      if (h.weak_first_stage) {
        out.warnings.push_back("weak first stage: F = " +
                               num(h.first_stage_f, 4) + " < 10");
      }
      result = {{"observations", d.observations()},
                {"alpha", h.alpha_level},
                {"wald", wald_json(h.wald, h.alpha_level)},
                {"control_coefficient", coefficient_json(h.control_coefficient)},
                {"first_stage_f", h.first_stage_f},
                {"weak_first_stage", h.weak_first_stage}};
      text << "Hausman control-function test (T = " << d.observations()
           << ", alpha = " << num(h.alpha_level) << ")\n"
           << "wald " << num(h.wald.statistic, 6) << ", df " << h.wald.df
           << ", p-value " << num(h.wald.p_value, 4) << ", reject "
           << (h.rejected ? "yes" : "no") << '\n'
           << "first-stage F " << num(h.first_stage_f, 5) << '\n';
      csv << "statistic,df,p_value,rejected,first_stage_f\n"
          << num(h.wald.statistic, 12) << ',' << h.wald.df << ','
          << num(h.wald.p_value, 12) << ',' << (h.rejected ? 1 : 0) << ','
          << num(h.first_stage_f, 12) << '\n';
      break;
    }
    case Command::simulate: {
      if (config.scenario_path.empty()) throw UsageError("--scenario is required");
      ScenarioSweep sweep = load_sweep(config.scenario_path);
      std::vector<MonteCarloSummary> summaries;
      json runs = json::array();
      for (auto& spec : sweep.scenarios) {
        if (config.reps) spec.n_reps = *config.reps;
        if (config.alpha) spec.alpha_level = *config.alpha;
        if (config.seed) spec.seed = *config.seed;
        summaries.push_back(run_scenario(spec));
        runs.push_back(summary_to_json(summaries.back()));
        timing[spec.name] = summaries.back().elapsed_seconds;
      }
      const Table table = emit_table(summaries, sweep.layout);
      result = {{"name", sweep.name},
                {"layout", to_string(sweep.layout)},
                {"table",
                 {{"header", table.header},
                  {"rows", table.rows},
                  {"notes", table.notes}}},
                {"summaries", runs}};
      text << sweep.name << '\n' << table.to_text();
      csv << table.to_csv();
      break;
    }
    case Command::factor: {
      const Marginal m = marginal_from_json(config.marginal);
      const double factor = prop1_factor(m);
      const double bound = prop1_bound(m);
      result = {{"marginal", marginal_to_json(m)},
                {"label", m.label()},
                {"factor", factor},
                {"bound", bound},
                {"quadrature", "gauss_hermite_128"}};
      text << "marginal " << m.label() << '\n'
           << "factor   " << num(factor, 15) << '\n'
           << "bound    " << num(bound, 15) << '\n';
      csv << "marginal,factor,bound\n"
          << m.label() << ',' << num(factor, 15) << ',' << num(bound, 15)
          << '\n';
      break;
    }
  }

  timing["total_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  out.document = {{"tool", "copula-exo"},
                  {"version", kVersion},
                  {"command", to_string(config.command)},
                  {"seed", config.seed ? json(*config.seed) : json(nullptr)},
                  {"timestamp", utc_timestamp()},
                  {"config", config_to_json(config)},
                  {"result", result},
                  {"warnings", out.warnings},
                  {"timing", timing}};
  switch (config.format) {
    case OutputFormat::json:
      out.rendered = out.document.dump(2) + "\n";
      break;
    case OutputFormat::csv:
      out.rendered = csv.str();
      break;
    case OutputFormat::text:
      out.rendered = text.str();
      break;
  }
  return out;
}

int exit_code_for(const std::exception& e) noexcept {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->category()) {
      case ErrorCategory::usage:
        return 2;
      case ErrorCategory::data:
        return 3;
      case ErrorCategory::numerical:
        return 4;
    }
  }
  return 4;
}

int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  try {
    const auto config = parse_args(argc, argv, out);
    if (!config) return 0;
    const RunResult r = run(*config);
    for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    out << r.rendered;
    out.flush();
    return 0;
  } catch (const std::exception& e) {
    err << "copula-exo: error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace copula_exo::cli
