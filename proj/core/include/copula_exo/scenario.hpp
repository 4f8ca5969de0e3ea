#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "copula_exo/marginals.hpp"

namespace copula_exo {

enum class ScenarioMode {
  /// Latent (Z*, eta*, eps*, X*); P from the reduced form.
  instrument,
  /// Latent (P*, eps*, X*, Z*); P drawn directly from its marginal.
  regressor,
};

struct StructuralCoefficients {
  double p_intercept = 1.0;
  std::vector<double> delta{0.1};           ///< X in the reduced form
  std::vector<double> gamma{0.1, 0.2, 0.3};  ///< Z in the reduced form
  double y_intercept = 1.0;
  std::vector<double> beta{0.3};  ///< X in the outcome equation
  double alpha = 1.0;             ///< P in the outcome equation
};

/// One Monte Carlo data-generating process plus its run settings.
///
/// Latent correlations not listed here (X-eta, Z-eta, X-X off-diagonals)
/// are zero.
struct ScenarioSpec {
  std::string name;
  ScenarioMode mode = ScenarioMode::instrument;
  std::size_t t = 200;
  std::size_t n_reps = 200;

  Eigen::MatrixXd sigma_z_star;  ///< m x m
  Eigen::VectorXd rho_z_eps;     ///< m
  double rho_eta_eps = 0.5;
  Eigen::MatrixXd rho_x_z;   ///< k x m
  Eigen::VectorXd rho_x_eps;  ///< k

  // regressor mode
  double rho_p_eps = 0.0;
  Eigen::VectorXd rho_x_p;  ///< k
  Eigen::VectorXd rho_p_z;  ///< m

  Marginal eps_marginal = Marginal::normal();
  Marginal eta_marginal = Marginal::normal();
  Marginal p_marginal = Marginal::student_t(2.0);
  std::vector<Marginal> z_marginals;
  std::vector<Marginal> x_marginals;

  StructuralCoefficients structural;
  double alpha_level = 0.05;
  std::uint64_t seed = 42;

  std::size_t m() const noexcept {
    return static_cast<std::size_t>(sigma_z_star.rows());
  }
  std::size_t k() const noexcept {
    return static_cast<std::size_t>(rho_x_z.rows());
  }

  /// Three instruments with Sigma_Z* = [1 .2 .3; .2 1 .4; .3 .4 1], Z1 ~ t(2),
  /// rho_eta_eps = 0.5, rho_X*Z* = 0.2, P = 1 + .1X + .1Z1 + .2Z2 + .3Z3 + eta,
  /// Y = 1 + .3X + P + eps.
  static ScenarioSpec instrument_defaults();
  /// One instrument, P ~ t(2), rho_X*P* = rho_X*Z* = 0.2, rho_P*Z* = 0.55,
  /// Y = 1 + .3X + P + eps.
  static ScenarioSpec regressor_defaults();

  /// Checks dimensions, ranges and positive definiteness of the latent
  /// correlation. Throws UsageError or NotPositiveDefinite.
  void validate() const;

  /// Hash of the data-generating part of the spec (everything except name,
  /// n_reps, alpha_level and seed), so that varying those reuses the same
  /// replication streams.
  std::uint64_t digest() const;
};

nlohmann::json scenario_to_json(const ScenarioSpec& spec);
/// Keys absent from `j` keep the defaults of the mode named by "mode".
/// Throws UsageError on malformed input.
ScenarioSpec scenario_from_json(const nlohmann::json& j);

enum class TableLayout { table1_style, table3_style };

const char* to_string(TableLayout layout) noexcept;
TableLayout table_layout_from_string(const std::string& s);

/// A sweep document:
///   {"name": ..., "layout": "table1_style", "base": {spec},
///    "eps_marginals": [marginal, ...], "cases": [{spec overrides}, ...]}
/// expanded in the order eps marginal (outer) x case (inner).
struct ScenarioSweep {
  std::string name;
  TableLayout layout = TableLayout::table1_style;
  std::vector<ScenarioSpec> scenarios;
};

ScenarioSweep sweep_from_json(const nlohmann::json& j);
/// Throws FileNotFound, or UsageError when the file is not valid JSON.
ScenarioSweep load_sweep(const std::string& path);

}  // namespace copula_exo
