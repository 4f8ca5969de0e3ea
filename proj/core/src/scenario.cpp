#include "copula_exo/scenario.hpp"

#include <cmath>
#include <fstream>

#include "copula_exo/errors.hpp"
#include "copula_exo/rng.hpp"
#include "copula_exo/simlab.hpp"

namespace copula_exo {

namespace {

using nlohmann::json;

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json matrix_json(const Eigen::MatrixXd& a) {
  json out = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    out.push_back(vector_json(a.row(i).transpose()));
  }
  return out;
}

Eigen::VectorXd vector_from(const json& j, const char* key) {
  if (!j.is_array()) throw UsageError(std::string(key) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw UsageError(std::string(key) + " must contain numbers");
    }
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_from(const json& j, const char* key) {
  if (!j.is_array()) throw UsageError(std::string(key) + " must be an array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::VectorXd row = vector_from(j[static_cast<std::size_t>(i)], key);
    if (row.size() != cols) {
      throw UsageError(std::string(key) + " rows differ in length");
    }
    a.row(i) = row.transpose();
  }
  return a;
}

std::vector<double> doubles_from(const json& j, const char* key) {
  const Eigen::VectorXd v = vector_from(j, key);
  return {v.data(), v.data() + v.size()};
}

std::vector<Marginal> marginals_from(const json& j, const char* key) {
  if (!j.is_array()) throw UsageError(std::string(key) + " must be an array");
  std::vector<Marginal> out;
  for (const auto& e : j) out.push_back(marginal_from_json(e));
  return out;
}

json marginals_json(const std::vector<Marginal>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(marginal_to_json(m));
  return out;
}

void check_correlation(double v, const std::string& what) {
  if (!(v >= -1.0 && v <= 1.0)) {
    throw UsageError(what + " must lie in [-1, 1]");
  }
}

void check_correlations(const Eigen::MatrixXd& a, const std::string& what) {
  for (Eigen::Index i = 0; i < a.size(); ++i) check_correlation(a.data()[i], what);
}

/// Applies the keys present in `j` on top of `spec`.
void apply_overrides(ScenarioSpec& spec, const json& j) {
  if (!j.is_object()) throw UsageError("scenario must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "name") {
        spec.name = value.get<std::string>();
      } else if (key == "mode") {
        // handled by the caller
      } else if (key == "T") {
        spec.t = value.get<std::size_t>();
      } else if (key == "n_reps") {
        spec.n_reps = value.get<std::size_t>();
      } else if (key == "sigma_z_star") {
        spec.sigma_z_star = matrix_from(value, "sigma_z_star");
      } else if (key == "rho_z_eps") {
        spec.rho_z_eps = vector_from(value, "rho_z_eps");
      } else if (key == "rho_eta_eps") {
        spec.rho_eta_eps = value.get<double>();
      } else if (key == "rho_x_z") {
        spec.rho_x_z = matrix_from(value, "rho_x_z");
      } else if (key == "rho_x_eps") {
        spec.rho_x_eps = vector_from(value, "rho_x_eps");
      } else if (key == "rho_p_eps") {
        spec.rho_p_eps = value.get<double>();
      } else if (key == "rho_x_p") {
        spec.rho_x_p = vector_from(value, "rho_x_p");
      } else if (key == "rho_p_z") {
        spec.rho_p_z = vector_from(value, "rho_p_z");
      } else if (key == "eps_marginal") {
        spec.eps_marginal = marginal_from_json(value);
      } else if (key == "eta_marginal") {
        spec.eta_marginal = marginal_from_json(value);
      } else if (key == "p_marginal") {
        spec.p_marginal = marginal_from_json(value);
      } else if (key == "z_marginals") {
        spec.z_marginals = marginals_from(value, "z_marginals");
      } else if (key == "x_marginals") {
        spec.x_marginals = marginals_from(value, "x_marginals");
      } else if (key == "structural") {
        auto& s = spec.structural;
        for (const auto& [sk, sv] : value.items()) {
          if (sk == "p_intercept") {
            s.p_intercept = sv.get<double>();
          } else if (sk == "delta") {
            s.delta = doubles_from(sv, "delta");
          } else if (sk == "gamma") {
            s.gamma = doubles_from(sv, "gamma");
          } else if (sk == "y_intercept") {
            s.y_intercept = sv.get<double>();
          } else if (sk == "beta") {
            s.beta = doubles_from(sv, "beta");
          } else if (sk == "alpha") {
            s.alpha = sv.get<double>();
          } else {
            throw UsageError("unknown structural key '" + sk + "'");
          }
        }
      } else if (key == "alpha_level") {
        spec.alpha_level = value.get<double>();
      } else if (key == "seed") {
        spec.seed = value.get<std::uint64_t>();
      } else {
        throw UsageError("unknown scenario key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed scenario: ") + e.what());
  }
}

ScenarioMode mode_of(const json& j, ScenarioMode fallback) {
  if (!j.contains("mode")) return fallback;
  const auto s = j.at("mode").get<std::string>();
  if (s == "instrument") return ScenarioMode::instrument;
  if (s == "regressor") return ScenarioMode::regressor;
  throw UsageError("unknown scenario mode '" + s + "'");
}

ScenarioSpec defaults_for(ScenarioMode mode) {
  return mode == ScenarioMode::instrument ? ScenarioSpec::instrument_defaults()
                                          : ScenarioSpec::regressor_defaults();
}

}  // namespace

ScenarioSpec ScenarioSpec::instrument_defaults() {
  ScenarioSpec s;
  s.name = "instrument";
  s.mode = ScenarioMode::instrument;
  s.sigma_z_star.resize(3, 3);
  s.sigma_z_star << 1.0, 0.2, 0.3,  //
      0.2, 1.0, 0.4,                //
      0.3, 0.4, 1.0;
  s.rho_z_eps = Eigen::VectorXd::Zero(3);
  s.rho_eta_eps = 0.5;
  s.rho_x_z = Eigen::MatrixXd::Constant(1, 3, 0.2);
  s.rho_x_eps = Eigen::VectorXd::Zero(1);
  s.rho_x_p = Eigen::VectorXd::Zero(1);
  s.rho_p_z = Eigen::VectorXd::Zero(3);
  s.z_marginals = {Marginal::student_t(2.0), Marginal::normal(),
                   Marginal::normal()};
  s.x_marginals = {Marginal::normal()};
  return s;
}

ScenarioSpec ScenarioSpec::regressor_defaults() {
  ScenarioSpec s;
  s.name = "regressor";
  s.mode = ScenarioMode::regressor;
  s.sigma_z_star = Eigen::MatrixXd::Identity(1, 1);
  s.rho_z_eps = Eigen::VectorXd::Zero(1);
  s.rho_eta_eps = 0.0;
  s.rho_x_z = Eigen::MatrixXd::Constant(1, 1, 0.2);
  s.rho_x_eps = Eigen::VectorXd::Zero(1);
  s.rho_p_eps = 0.0;
  s.rho_x_p = Eigen::VectorXd::Constant(1, 0.2);
  s.rho_p_z = Eigen::VectorXd::Constant(1, 0.55);
  s.p_marginal = Marginal::student_t(2.0);
  s.z_marginals = {Marginal::normal()};
  s.x_marginals = {Marginal::normal()};
  s.structural.gamma.clear();
  s.structural.delta.clear();
  return s;
}

void ScenarioSpec::validate() const {
  const auto mm = static_cast<Eigen::Index>(m());
  const auto kk = static_cast<Eigen::Index>(k());
  if (t < 10) throw UsageError("scenario T must be at least 10");
  if (n_reps == 0) throw UsageError("scenario n_reps must be positive");
  if (!(alpha_level > 0.0 && alpha_level < 1.0)) {
    throw UsageError("scenario alpha_level must lie in (0, 1)");
  }
  if (sigma_z_star.cols() != mm) throw UsageError("sigma_z_star must be square");
  if (mode == ScenarioMode::instrument && mm == 0) {
    throw UsageError("instrument scenarios need at least one instrument");
  }
  if (rho_z_eps.size() != mm) throw UsageError("rho_z_eps must have m entries");
  if (rho_x_z.rows() > 0 && rho_x_z.cols() != mm) {
    throw UsageError("rho_x_z must be k x m");
  }
  if (rho_x_eps.size() != kk) throw UsageError("rho_x_eps must have k entries");
  if (z_marginals.size() != m()) throw UsageError("z_marginals must have m entries");
  if (x_marginals.size() != k()) throw UsageError("x_marginals must have k entries");
  if (mode == ScenarioMode::regressor) {
    if (rho_x_p.size() != kk) throw UsageError("rho_x_p must have k entries");
    if (rho_p_z.size() != mm) throw UsageError("rho_p_z must have m entries");
    check_correlation(rho_p_eps, "rho_p_eps");
    check_correlations(rho_x_p, "rho_x_p");
    check_correlations(rho_p_z, "rho_p_z");
  } else {
    if (structural.gamma.size() != m()) {
      throw UsageError("structural.gamma must have m entries");
    }
    if (structural.delta.size() != k()) {
      throw UsageError("structural.delta must have k entries");
    }
    check_correlation(rho_eta_eps, "rho_eta_eps");
  }
  if (structural.beta.size() != k()) {
    throw UsageError("structural.beta must have k entries");
  }
  check_correlations(sigma_z_star, "sigma_z_star");
  check_correlations(rho_z_eps, "rho_z_eps");
  check_correlations(rho_x_z, "rho_x_z");
  check_correlations(rho_x_eps, "rho_x_eps");
  for (Eigen::Index i = 0; i < mm; ++i) {
    if (sigma_z_star(i, i) != 1.0) {
      throw UsageError("sigma_z_star must have a unit diagonal");
    }
  }
  assemble_latent_correlation(*this);
}

std::uint64_t ScenarioSpec::digest() const {
  json j = scenario_to_json(*this);
  j.erase("name");
  j.erase("n_reps");
  j.erase("alpha_level");
  j.erase("seed");
  return hash_bytes(j.dump());
}

nlohmann::json scenario_to_json(const ScenarioSpec& s) {
  json j;
  j["name"] = s.name;
  j["mode"] = s.mode == ScenarioMode::instrument ? "instrument" : "regressor";
  j["T"] = s.t;
  j["n_reps"] = s.n_reps;
  j["sigma_z_star"] = matrix_json(s.sigma_z_star);
  j["rho_z_eps"] = vector_json(s.rho_z_eps);
  j["rho_x_z"] = matrix_json(s.rho_x_z);
  j["rho_x_eps"] = vector_json(s.rho_x_eps);
  j["eps_marginal"] = marginal_to_json(s.eps_marginal);
  j["z_marginals"] = marginals_json(s.z_marginals);
  j["x_marginals"] = marginals_json(s.x_marginals);
  json st;
  st["y_intercept"] = s.structural.y_intercept;
  st["beta"] = s.structural.beta;
  st["alpha"] = s.structural.alpha;
  if (s.mode == ScenarioMode::instrument) {
    j["rho_eta_eps"] = s.rho_eta_eps;
    j["eta_marginal"] = marginal_to_json(s.eta_marginal);
    st["p_intercept"] = s.structural.p_intercept;
    st["delta"] = s.structural.delta;
    st["gamma"] = s.structural.gamma;
  } else {
    j["rho_p_eps"] = s.rho_p_eps;
    j["rho_x_p"] = vector_json(s.rho_x_p);
    j["rho_p_z"] = vector_json(s.rho_p_z);
    j["p_marginal"] = marginal_to_json(s.p_marginal);
  }
  j["structural"] = st;
  j["alpha_level"] = s.alpha_level;
  j["seed"] = s.seed;
  return j;
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("scenario must be a JSON object");
  ScenarioSpec spec = defaults_for(mode_of(j, ScenarioMode::instrument));
  apply_overrides(spec, j);
  spec.validate();
  return spec;
}

const char* to_string(TableLayout layout) noexcept {
  return layout == TableLayout::table1_style ? "table1_style" : "table3_style";
}

TableLayout table_layout_from_string(const std::string& s) {
  if (s == "table1_style") return TableLayout::table1_style;
  if (s == "table3_style") return TableLayout::table3_style;
  throw UsageError("unknown table layout '" + s + "'");
}

ScenarioSweep sweep_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("base")) {
    throw UsageError("a scenario sweep needs an object with a 'base' entry");
  }
  ScenarioSweep sweep;
  try {
    sweep.name = j.value("name", std::string("sweep"));
    const json& base = j.at("base");
    const ScenarioMode mode = mode_of(base, ScenarioMode::instrument);
    sweep.layout = table_layout_from_string(j.value(
        "layout", std::string(mode == ScenarioMode::instrument
                                  ? "table1_style"
                                  : "table3_style")));

    std::vector<json> eps{json()};
    if (j.contains("eps_marginals")) {
      eps.assign(j.at("eps_marginals").begin(), j.at("eps_marginals").end());
    }
    std::vector<json> cases{json::object()};
    if (j.contains("cases")) {
      cases.assign(j.at("cases").begin(), j.at("cases").end());
    }
    for (const auto& e : eps) {
      for (const auto& c : cases) {
        ScenarioSpec spec = defaults_for(mode);
        apply_overrides(spec, base);
        if (c.contains("mode") && mode_of(c, mode) != mode) {
          throw UsageError("all cases of a sweep must share the base mode");
        }
        apply_overrides(spec, c);
        if (!e.is_null()) spec.eps_marginal = marginal_from_json(e);
        if (!c.contains("name")) {
          spec.name = sweep.name + " #" +
                      std::to_string(sweep.scenarios.size() + 1);
        }
        spec.validate();
        sweep.scenarios.push_back(std::move(spec));
      }
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed scenario sweep: ") + e.what());
  }
  return sweep;
}

ScenarioSweep load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("cannot parse " + path + ": " + e.what());
  }
  return sweep_from_json(j);
}

}  // namespace copula_exo
