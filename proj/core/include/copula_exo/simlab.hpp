#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "copula_exo/dataset.hpp"
#include "copula_exo/errors.hpp"
#include "copula_exo/rng.hpp"
#include "copula_exo/scenario.hpp"

namespace copula_exo {

/// Full latent correlation matrix in the order (Z*_1..Z*_m, eta*, eps*,
/// X*_1..X*_k) for instrument scenarios and (P*, eps*, X*_1..X*_k,
/// Z*_1..Z*_m) for regressor scenarios. Throws NotPositiveDefinite with the
/// matrix attached when it is not positive definite.
Eigen::MatrixXd assemble_latent_correlation(const ScenarioSpec& spec);

/// Names of the latent coordinates in assemble_latent_correlation order.
std::vector<std::string> latent_labels(const ScenarioSpec& spec);

/// Stream used for replication `rep` of `spec`.
RngStream replication_stream(const ScenarioSpec& spec, std::size_t rep);

struct Replication {
  Dataset data;
  Eigen::VectorXd eps;            ///< structural error
  Eigen::MatrixXd latent;         ///< T x d standard normal scores
};

/// Draws T rows of latent scores through the Cholesky factor, maps each
/// coordinate through its marginal as Q(Phi(latent)) and builds P and Y from
/// the structural equations.
Replication generate_replication(const ScenarioSpec& spec, RngStream& rng);
Replication generate_replication(const ScenarioSpec& spec, std::size_t rep);

/// Aborted scenario run; carries the failing replication index and the
/// category of the underlying error.
class ReplicationFailed : public Error {
 public:
  ReplicationFailed(std::size_t rep, ErrorCategory category,
                    const std::string& cause)
      : Error(category, "replication " + std::to_string(rep) + " failed: " +
                            cause),
        rep_(rep) {}
  std::size_t rep_index() const noexcept { return rep_; }

 private:
  std::size_t rep_;
};

struct MonteCarloSummary {
  ScenarioSpec spec;
  std::uint64_t digest = 0;
  /// "z1".."zm", "joint" (instrument) or "copula", "hausman" (regressor).
  std::vector<std::string> hypotheses;
  std::vector<std::size_t> rejection_counts;
  std::vector<double> rejection_rates;
  std::vector<double> mc_standard_errors;
  /// Mean over replications of the sample correlation of P and eps.
  double mean_rho_p_eps = 0.0;
  /// Replications whose Hausman first stage had F < 10.
  std::size_t weak_first_stage = 0;
  double elapsed_seconds = 0.0;

  std::size_t n_reps() const noexcept { return spec.n_reps; }
  double rate(const std::string& hypothesis) const;
};

/// Equality of everything except elapsed time.
bool operator==(const MonteCarloSummary& a, const MonteCarloSummary& b);

/// Runs spec.n_reps replications (in parallel, results reduced in
/// replication order) with one pass of the tests per replication. Throws
/// ReplicationFailed on the first failing replication.
MonteCarloSummary run_scenario(const ScenarioSpec& spec);

nlohmann::json summary_to_json(const MonteCarloSummary& s);

}  // namespace copula_exo
