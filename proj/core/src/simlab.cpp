#include "copula_exo/simlab.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "copula_exo/exo_test.hpp"
#include "copula_exo/parallel.hpp"
#include "copula_exo/regress.hpp"

namespace copula_exo {

namespace {

struct Layout {
  Eigen::Index z = 0, eta = -1, eps = 0, x = 0, p = -1;
  Eigen::Index dim = 0;
};

Layout layout_of(const ScenarioSpec& s) {
  const auto m = static_cast<Eigen::Index>(s.m());
  const auto k = static_cast<Eigen::Index>(s.k());
  Layout l;
  if (s.mode == ScenarioMode::instrument) {
    l.z = 0;
    l.eta = m;
    l.eps = m + 1;
    l.x = m + 2;
  } else {
    l.p = 0;
    l.eps = 1;
    l.x = 2;
    l.z = 2 + k;
  }
  l.dim = m + k + 2;
  return l;
}

void set_pair(Eigen::MatrixXd& c, Eigen::Index i, Eigen::Index j, double v) {
  c(i, j) = v;
  c(j, i) = v;
}

}  // namespace

Eigen::MatrixXd assemble_latent_correlation(const ScenarioSpec& s) {
  const auto m = static_cast<Eigen::Index>(s.m());
  const auto k = static_cast<Eigen::Index>(s.k());
  const Layout l = layout_of(s);
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(l.dim, l.dim);

  c.block(l.z, l.z, m, m) = s.sigma_z_star;
  for (Eigen::Index i = 0; i < m; ++i) {
    set_pair(c, l.z + i, l.eps, s.rho_z_eps(i));
    for (Eigen::Index a = 0; a < k; ++a) {
      set_pair(c, l.x + a, l.z + i, s.rho_x_z(a, i));
    }
  }
  for (Eigen::Index a = 0; a < k; ++a) {
    set_pair(c, l.x + a, l.eps, s.rho_x_eps(a));
  }
  if (s.mode == ScenarioMode::instrument) {
    set_pair(c, l.eta, l.eps, s.rho_eta_eps);
  } else {
    set_pair(c, l.p, l.eps, s.rho_p_eps);
    for (Eigen::Index a = 0; a < k; ++a) set_pair(c, l.p, l.x + a, s.rho_x_p(a));
    for (Eigen::Index i = 0; i < m; ++i) set_pair(c, l.p, l.z + i, s.rho_p_z(i));
  }

  try {
    cholesky_lower(c);
  } catch (const NotPositiveDefinite& e) {
    const auto labels = latent_labels(s);
    throw NotPositiveDefinite(
        "latent correlation matrix is not positive definite (pivot " +
            std::to_string(e.pivot()) + ", " + labels[e.pivot()] + ")",
        e.pivot(), c);
  }
  return c;
}

std::vector<std::string> latent_labels(const ScenarioSpec& s) {
  const Layout l = layout_of(s);
  std::vector<std::string> out(static_cast<std::size_t>(l.dim));
  for (std::size_t i = 0; i < s.m(); ++i) {
    out[static_cast<std::size_t>(l.z) + i] = "z" + std::to_string(i + 1) + "*";
  }
  for (std::size_t a = 0; a < s.k(); ++a) {
    out[static_cast<std::size_t>(l.x) + a] = "x" + std::to_string(a + 1) + "*";
  }
  out[static_cast<std::size_t>(l.eps)] = "eps*";
  if (l.eta >= 0) out[static_cast<std::size_t>(l.eta)] = "eta*";
  if (l.p >= 0) out[static_cast<std::size_t>(l.p)] = "p*";
  return out;
}

RngStream replication_stream(const ScenarioSpec& spec, std::size_t rep) {
  return RngStream(spec.seed, hash_combine(spec.digest(), rep));
}

Replication generate_replication(const ScenarioSpec& s, RngStream& rng) {
  const auto t = static_cast<Eigen::Index>(s.t);
  const auto m = static_cast<Eigen::Index>(s.m());
  const auto k = static_cast<Eigen::Index>(s.k());
  const Layout l = layout_of(s);
  const Eigen::MatrixXd chol = cholesky_lower(assemble_latent_correlation(s));

  Eigen::MatrixXd normals(t, l.dim);
  for (Eigen::Index r = 0; r < t; ++r) {
    for (Eigen::Index c = 0; c < l.dim; ++c) normals(r, c) = rng.normal();
  }
  Replication out;
  out.latent = normals * chol.transpose();

  const auto map = [&](Eigen::Index col, const Marginal& marginal) {
    Eigen::VectorXd v(t);
    for (Eigen::Index r = 0; r < t; ++r) {
      v(r) = marginal.quantile_from_normal(out.latent(r, col));
    }
    return v;
  };

  Dataset& d = out.data;
  d.z_block.resize(t, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    d.z_block.col(i) = map(l.z + i, s.z_marginals[static_cast<std::size_t>(i)]);
  }
  d.x_block.resize(t, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    d.x_block.col(a) = map(l.x + a, s.x_marginals[static_cast<std::size_t>(a)]);
  }
  out.eps = map(l.eps, s.eps_marginal);

  const auto& st = s.structural;
  if (s.mode == ScenarioMode::instrument) {
    d.p = map(l.eta, s.eta_marginal);
    d.p.array() += st.p_intercept;
    for (Eigen::Index a = 0; a < k; ++a) {
      d.p += st.delta[static_cast<std::size_t>(a)] * d.x_block.col(a);
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      d.p += st.gamma[static_cast<std::size_t>(i)] * d.z_block.col(i);
    }
  } else {
    d.p = map(l.p, s.p_marginal);
  }
  d.y = st.alpha * d.p + out.eps;
  d.y.array() += st.y_intercept;
  for (Eigen::Index a = 0; a < k; ++a) {
    d.y += st.beta[static_cast<std::size_t>(a)] * d.x_block.col(a);
  }
  d.validate();
  return out;
}

Replication generate_replication(const ScenarioSpec& spec, std::size_t rep) {
  RngStream rng = replication_stream(spec, rep);
  return generate_replication(spec, rng);
}

double MonteCarloSummary::rate(const std::string& hypothesis) const {
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    if (hypotheses[i] == hypothesis) return rejection_rates[i];
  }
  throw UsageError("unknown hypothesis '" + hypothesis + "'");
}

bool operator==(const MonteCarloSummary& a, const MonteCarloSummary& b) {
  return a.digest == b.digest && a.spec.seed == b.spec.seed &&
         a.spec.n_reps == b.spec.n_reps &&
         a.spec.alpha_level == b.spec.alpha_level &&
         a.hypotheses == b.hypotheses &&
         a.rejection_counts == b.rejection_counts &&
         a.rejection_rates == b.rejection_rates &&
         a.mc_standard_errors == b.mc_standard_errors &&
         a.mean_rho_p_eps == b.mean_rho_p_eps &&
         a.weak_first_stage == b.weak_first_stage;
}

MonteCarloSummary run_scenario(const ScenarioSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();

  MonteCarloSummary summary;
  summary.spec = spec;
  summary.digest = spec.digest();
  if (spec.mode == ScenarioMode::instrument) {
    for (std::size_t i = 0; i < spec.m(); ++i) {
      summary.hypotheses.push_back("z" + std::to_string(i + 1));
    }
    summary.hypotheses.push_back("joint");
  } else {
    summary.hypotheses = {"copula"};
    if (spec.m() > 0) summary.hypotheses.push_back("hausman");
  }
  const std::size_t h = summary.hypotheses.size();

  struct RepResult {
    std::vector<char> rejected;
    double rho_p_eps = 0.0;
    bool weak = false;
  };
  std::vector<RepResult> results(spec.n_reps);

  TestOptions options;
  options.alpha = spec.alpha_level;
  options.n_draws = 1;
  options.estimate_raw = false;

  parallel_for(spec.n_reps, [&](std::size_t rep) {
    try {
      RngStream rng = replication_stream(spec, rep);
      const Replication r = generate_replication(spec, rng);
      RepResult& out = results[rep];
      out.rho_p_eps = sample_correlation(r.data.p, r.eps);
      out.rejected.reserve(h);
      // Scores are continuous here, so the test never consumes this stream.
      RngStream unused = rng.substream(1);
      if (spec.mode == ScenarioMode::instrument) {
        const auto report =
            instrument_exogeneity_test(r.data, options, unused);
        for (const auto& c : report.columns) {
          out.rejected.push_back(c.wald.rejects(spec.alpha_level));
        }
        out.rejected.push_back(report.joint.rejects(spec.alpha_level));
      } else {
        const auto report = regressor_exogeneity_test(r.data, options, unused);
        out.rejected.push_back(
            report.columns.front().wald.rejects(spec.alpha_level));
        if (spec.m() > 0) {
          const auto hausman = hausman_test(r.data, spec.alpha_level);
          out.rejected.push_back(hausman.rejected);
          out.weak = hausman.weak_first_stage;
        }
      }
    } catch (const Error& e) {
      throw ReplicationFailed(rep, e.category(), e.what());
    }
  });

  summary.rejection_counts.assign(h, 0);
  double sum_rho = 0.0;
  for (const auto& r : results) {
    for (std::size_t j = 0; j < h; ++j) summary.rejection_counts[j] += r.rejected[j];
    sum_rho += r.rho_p_eps;
    summary.weak_first_stage += r.weak;
  }
  const double n = static_cast<double>(spec.n_reps);
  for (std::size_t j = 0; j < h; ++j) {
    const double rate = static_cast<double>(summary.rejection_counts[j]) / n;
    summary.rejection_rates.push_back(rate);
    summary.mc_standard_errors.push_back(std::sqrt(rate * (1.0 - rate) / n));
  }
  summary.mean_rho_p_eps = sum_rho / n;
  summary.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return summary;
}

nlohmann::json summary_to_json(const MonteCarloSummary& s) {
  nlohmann::json j;
  j["scenario"] = scenario_to_json(s.spec);
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(s.digest));
  j["digest"] = digest;
  j["n_reps"] = s.spec.n_reps;
  j["alpha"] = s.spec.alpha_level;
  j["mean_rho_p_eps"] = s.mean_rho_p_eps;
  nlohmann::json rates = nlohmann::json::object();
  for (std::size_t i = 0; i < s.hypotheses.size(); ++i) {
    rates[s.hypotheses[i]] = {{"rejections", s.rejection_counts[i]},
                              {"rate", s.rejection_rates[i]},
                              {"mc_se", s.mc_standard_errors[i]}};
  }
  j["rejection"] = rates;
  j["weak_first_stage"] = s.weak_first_stage;
  return j;
}

}  // namespace copula_exo
