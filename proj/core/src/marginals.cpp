#include "copula_exo/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "copula_exo/errors.hpp"
#include "copula_exo/special_functions.hpp"

namespace copula_exo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("quantile: p must lie in [0, 1], got " +
                      std::to_string(p));
  }
}

std::string format_number(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

/// Lower-tail Student-t quantile for p in (0, 0.5].
double student_t_lower_quantile(double p, double df) {
  if (p == 0.5) return 0.0;
  if (df == 1.0) return -1.0 / std::tan(std::numbers::pi * p);
  if (df == 2.0) return -(1.0 - 2.0 * p) / std::sqrt(2.0 * p * (1.0 - p));
  if (p < 0.25) {
    // P(T < -x) = I_{df/(df+x^2)}(df/2, 1/2) / 2
    const double y = inverse_regularized_beta(0.5 * df, 0.5, 2.0 * p);
    if (y == 0.0) return -kInf;
    return -std::sqrt(df * (1.0 - y) / y);
  }
  // P(|T| < x) = I_{x^2/(df+x^2)}(1/2, df/2) = 1 - 2p
  const double z = inverse_regularized_beta(0.5, 0.5 * df, 1.0 - 2.0 * p);
  return -std::sqrt(df * z / (1.0 - z));
}

}  // namespace

// ---- EmpiricalCdf -----------------------------------------------------------

EmpiricalCdf::EmpiricalCdf(std::span<const double> sample)
    : sorted_(sample.begin(), sample.end()) {
  if (sorted_.empty()) throw EmptyInput("empirical CDF of an empty sample");
  for (double x : sorted_) {
    if (!std::isfinite(x)) {
      throw DomainError("empirical CDF: sample contains a non-finite value");
    }
  }
  std::sort(sorted_.begin(), sorted_.end());
  double sum = 0.0;
  for (double x : sorted_) sum += x;
  mean_ = sum / static_cast<double>(sorted_.size());
  double ss = 0.0;
  for (double x : sorted_) ss += (x - mean_) * (x - mean_);
  stddev_ = std::sqrt(ss / static_cast<double>(sorted_.size()));
}

double EmpiricalCdf::operator()(double x) const noexcept {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), x) -
                     sorted_.begin();
  return static_cast<double>(count) /
         static_cast<double>(sorted_.size() + 1);
}

double EmpiricalCdf::quantile(double p) const {
  check_probability(p);
  const double n1 = static_cast<double>(sorted_.size() + 1);
  const double k = std::ceil(p * n1);
  const auto index = static_cast<std::size_t>(
      std::clamp(k, 1.0, static_cast<double>(sorted_.size())));
  return sorted_[index - 1];
}

std::vector<double> EmpiricalCdf::normal_breakpoints() const {
  std::vector<double> cuts;
  const double n1 = static_cast<double>(sorted_.size() + 1);
  for (std::size_t k = 1; k < sorted_.size(); ++k) {
    if (sorted_[k] != sorted_[k - 1]) {
      cuts.push_back(normal_quantile(static_cast<double>(k) / n1));
    }
  }
  return cuts;
}

EmpiricalCdf fit_empirical(std::span<const double> sample) {
  return EmpiricalCdf(sample);
}

// ---- inverse incomplete beta ------------------------------------------------

double inverse_regularized_beta(double a, double b, double p) {
  if (!(a > 0.0 && b > 0.0)) {
    throw DomainError("inverse_regularized_beta: shapes must be positive");
  }
  check_probability(p);
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  try {
    return boost::math::ibeta_inv(a, b, p);
  } catch (const std::exception&) {
    // Boost's Newton iteration gives up deep in the lower tail (p below
    // ~1e-90 for a = 2). Solve log I_x(a, b) = log p over log x instead.
  }
  const double log_p = std::log(p);
  const auto f = [&](double t) {
    const double v = boost::math::ibeta(a, b, std::exp(t));
    return (v > 0.0 ? std::log(v) : -std::numeric_limits<double>::max()) - log_p;
  };
  // I_x ~ x^a / (a B(a, b)) for small x
  const double guess =
      (log_p + std::log(a) + std::log(boost::math::beta(a, b))) / a;
  double lo = std::min(guess, -1.0) - 2.0;
  while (f(lo) > 0.0 && lo > -745.0) lo -= 8.0;
  const double hi = 0.0;
  if (f(lo) > 0.0) return std::exp(lo);
  std::uintmax_t iterations = 200;
  const auto [left, right] = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iterations);
  return std::exp(0.5 * (left + right));
}

// ---- Marginal ---------------------------------------------------------------

Marginal Marginal::normal(double mean, double sd) {
  require(std::isfinite(mean) && sd > 0.0 && std::isfinite(sd),
          "normal marginal needs finite mean and sd > 0");
  return Marginal(Normal{mean, sd});
}

Marginal Marginal::student_t(double df) {
  require(df >= 1.0 && std::isfinite(df), "student_t marginal needs df >= 1");
  return Marginal(StudentT{df});
}

Marginal Marginal::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
          "uniform marginal needs finite a < b");
  return Marginal(Uniform{lo, hi});
}

Marginal Marginal::exponential(double rate) {
  require(rate > 0.0 && std::isfinite(rate),
          "exponential marginal needs rate > 0");
  return Marginal(Exponential{rate});
}

Marginal Marginal::beta(double shape1, double shape2) {
  require(shape1 > 0.0 && shape2 > 0.0 && std::isfinite(shape1) &&
              std::isfinite(shape2),
          "beta marginal needs positive shapes");
  return Marginal(Beta{shape1, shape2});
}

Marginal Marginal::empirical(EmpiricalCdf cdf) {
  return Marginal(std::make_shared<const EmpiricalCdf>(std::move(cdf)));
}

MarginalFamily Marginal::family() const noexcept {
  return static_cast<MarginalFamily>(family_.index());
}

const EmpiricalCdf* Marginal::empirical_cdf() const noexcept {
  if (const auto* e = std::get_if<Empirical>(&family_)) return e->get();
  return nullptr;
}

double Marginal::cdf(double x) const {
  if (std::isnan(x)) throw DomainError("cdf: x is NaN");
  return std::visit(
      Overloaded{
          [x](const Normal& n) { return normal_cdf((x - n.mean) / n.sd); },
          [x](const StudentT& t) { return student_t_cdf(x, t.df); },
          [x](const Uniform& u) {
            return std::clamp((x - u.lo) / (u.hi - u.lo), 0.0, 1.0);
          },
          [x](const Exponential& e) {
            return x <= 0.0 ? 0.0 : -std::expm1(-e.rate * x);
          },
          [x](const Beta& b) {
            if (x <= 0.0) return 0.0;
            if (x >= 1.0) return 1.0;
            return regularized_beta(b.shape1, b.shape2, x);
          },
          [x](const Empirical& e) { return (*e)(x); },
      },
      family_);
}

double Marginal::quantile(double p) const {
  check_probability(p);
  return std::visit(
      Overloaded{
          [p](const Normal& n) { return n.mean + n.sd * normal_quantile(p); },
          [p](const StudentT& t) {
            if (p == 0.0 || p == 1.0) {
              throw DomainError("student_t quantile undefined at p = 0 or 1");
            }
            return p <= 0.5 ? student_t_lower_quantile(p, t.df)
                            : -student_t_lower_quantile(1.0 - p, t.df);
          },
          [p](const Uniform& u) { return u.lo + (u.hi - u.lo) * p; },
          [p](const Exponential& e) {
            if (p == 1.0) {
              throw DomainError("exponential quantile undefined at p = 1");
            }
            return -std::log1p(-p) / e.rate;
          },
          [p](const Beta& b) {
            return inverse_regularized_beta(b.shape1, b.shape2, p);
          },
          [p](const Empirical& e) { return e->quantile(p); },
      },
      family_);
}

double Marginal::upper_quantile(double q) const {
  check_probability(q);
  return std::visit(
      Overloaded{
          [q](const Normal& n) {
            if (q == 0.0) throw DomainError("normal quantile undefined at 1");
            return n.mean - n.sd * normal_quantile(q);
          },
          [q](const StudentT& t) {
            if (q == 0.0 || q == 1.0) {
              throw DomainError("student_t quantile undefined at p = 0 or 1");
            }
            return q <= 0.5 ? -student_t_lower_quantile(q, t.df)
                            : student_t_lower_quantile(1.0 - q, t.df);
          },
          [q](const Uniform& u) { return u.hi - (u.hi - u.lo) * q; },
          [q](const Exponential& e) {
            if (q == 0.0) {
              throw DomainError("exponential quantile undefined at p = 1");
            }
            return -std::log(q) / e.rate;
          },
          [q](const Beta& b) {
            return 1.0 - inverse_regularized_beta(b.shape2, b.shape1, q);
          },
          [q](const Empirical& e) { return e->quantile(1.0 - q); },
      },
      family_);
}

double Marginal::quantile_from_normal(double v) const {
  if (std::isnan(v)) throw DomainError("quantile_from_normal: v is NaN");
  if (v <= 0.0) return quantile(normal_cdf(v));
  return upper_quantile(normal_sf(v));
}

double Marginal::mean() const {
  return std::visit(
      Overloaded{
          [](const Normal& n) { return n.mean; },
          [](const StudentT& t) {
            return t.df > 1.0 ? 0.0
                              : std::numeric_limits<double>::quiet_NaN();
          },
          [](const Uniform& u) { return 0.5 * (u.lo + u.hi); },
          [](const Exponential& e) { return 1.0 / e.rate; },
          [](const Beta& b) { return b.shape1 / (b.shape1 + b.shape2); },
          [](const Empirical& e) { return e->mean(); },
      },
      family_);
}

double Marginal::stddev() const {
  return std::visit(
      Overloaded{
          [](const Normal& n) { return n.sd; },
          [](const StudentT& t) {
            return t.df > 2.0 ? std::sqrt(t.df / (t.df - 2.0)) : kInf;
          },
          [](const Uniform& u) { return (u.hi - u.lo) / std::sqrt(12.0); },
          [](const Exponential& e) { return 1.0 / e.rate; },
          [](const Beta& b) {
            const double s = b.shape1 + b.shape2;
            return std::sqrt(b.shape1 * b.shape2 / (s * s * (s + 1.0)));
          },
          [](const Empirical& e) { return e->stddev(); },
      },
      family_);
}

bool Marginal::has_finite_variance() const {
  return std::isfinite(stddev());
}

std::string Marginal::label() const {
  return std::visit(
      Overloaded{
          [](const Normal& n) {
            return "N(" + format_number(n.mean) + "," +
                   format_number(n.sd * n.sd) + ")";
          },
          [](const StudentT& t) { return "t(" + format_number(t.df) + ")"; },
          [](const Uniform& u) {
            return "U(" + format_number(u.lo) + "," + format_number(u.hi) +
                   ")";
          },
          [](const Exponential& e) {
            return "EXP(" + format_number(1.0 / e.rate) + ")";
          },
          [](const Beta& b) {
            return "BETA(" + format_number(b.shape1) + "," +
                   format_number(b.shape2) + ")";
          },
          [](const Empirical& e) {
            return "empirical(T=" + std::to_string(e->size()) + ")";
          },
      },
      family_);
}

bool operator==(const Marginal& a, const Marginal& b) {
  if (a.family_.index() != b.family_.index()) return false;
  return std::visit(
      Overloaded{
          [&b](const Marginal::Normal& x) {
            const auto& y = std::get<Marginal::Normal>(b.family_);
            return x.mean == y.mean && x.sd == y.sd;
          },
          [&b](const Marginal::StudentT& x) {
            return x.df == std::get<Marginal::StudentT>(b.family_).df;
          },
          [&b](const Marginal::Uniform& x) {
            const auto& y = std::get<Marginal::Uniform>(b.family_);
            return x.lo == y.lo && x.hi == y.hi;
          },
          [&b](const Marginal::Exponential& x) {
            return x.rate == std::get<Marginal::Exponential>(b.family_).rate;
          },
          [&b](const Marginal::Beta& x) {
            const auto& y = std::get<Marginal::Beta>(b.family_);
            return x.shape1 == y.shape1 && x.shape2 == y.shape2;
          },
          [&b](const Marginal::Empirical& x) {
            const auto& y = std::get<Marginal::Empirical>(b.family_);
            return x == y || x->sorted_values() == y->sorted_values();
          },
      },
      a.family_);
}

nlohmann::json marginal_to_json(const Marginal& m) {
  using nlohmann::json;
  return std::visit(
      Overloaded{
          [](const Marginal::Normal& n) {
            return json{{"family", "normal"}, {"mean", n.mean}, {"sd", n.sd}};
          },
          [](const Marginal::StudentT& t) {
            return json{{"family", "student_t"}, {"df", t.df}};
          },
          [](const Marginal::Uniform& u) {
            return json{{"family", "uniform"}, {"lo", u.lo}, {"hi", u.hi}};
          },
          [](const Marginal::Exponential& e) {
            return json{{"family", "exponential"}, {"rate", e.rate}};
          },
          [](const Marginal::Beta& b) {
            return json{
                {"family", "beta"}, {"shape1", b.shape1}, {"shape2", b.shape2}};
          },
          [](const Marginal::Empirical&) -> json {
            throw UsageError("empirical marginals cannot be serialized");
          },
      },
      m.parameters());
}

Marginal marginal_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family")) {
    throw UsageError("marginal must be an object with a 'family' key");
  }
  const std::string family = j.at("family").get<std::string>();
  try {
    if (family == "normal") {
      return Marginal::normal(j.value("mean", 0.0), j.value("sd", 1.0));
    }
    if (family == "student_t") return Marginal::student_t(j.at("df"));
    if (family == "uniform") return Marginal::uniform(j.at("lo"), j.at("hi"));
    if (family == "exponential") {
      return Marginal::exponential(j.value("rate", 1.0));
    }
    if (family == "beta") return Marginal::beta(j.at("shape1"), j.at("shape2"));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("marginal '" + family + "': " + e.what());
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  throw UsageError("unknown marginal family '" + family + "'");
}

}  // namespace copula_exo
