#include "copula_exo/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <string>

#include <Eigen/Eigenvalues>

#include "copula_exo/errors.hpp"
#include "copula_exo/special_functions.hpp"

namespace copula_exo {

namespace {

QuadratureRule build_gauss_hermite(std::size_t n) {
  if (n == 0) throw DomainError("gauss_hermite_rule: need at least one node");
  QuadratureRule rule;
  rule.kind = QuadratureKind::gauss_hermite_normalized;
  if (n == 1) {
    rule.nodes = {0.0};
    rule.weights = {1.0};
    return rule;
  }

  // Golub-Welsch: the Jacobi matrix of the probabilists' Hermite recurrence
  // has zero diagonal and sqrt(k) on the off-diagonal.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n - 1));
  for (std::size_t k = 1; k < n; ++k) {
    sub(static_cast<Eigen::Index>(k - 1)) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("gauss_hermite_rule: eigenvalue solver failed");
  }

  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double x = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    double sum_sq = 0.0;
    // Newton polish on the orthonormal recurrence, then Christoffel weights.
    for (int iter = 0; iter < 3; ++iter) {
      double h_prev = 0.0;
      double h = 1.0;
      sum_sq = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        sum_sq += h * h;
        const double h_next =
            (x * h - std::sqrt(static_cast<double>(k)) * h_prev) /
            std::sqrt(static_cast<double>(k + 1));
        h_prev = h;
        h = h_next;
      }
      // h = h_n(x), h_prev = h_{n-1}(x); h_n' = sqrt(n) h_{n-1}.
      if (h_prev != 0.0) x -= h / (sqrt_n * h_prev);
    }
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / sum_sq;
  }
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& g, double lo,
                      double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = g(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = g(center - dx);
    const double f2 = g(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  const double value = kronrod * half;
  const double error = std::abs((kronrod - gauss) * half);
  if (!std::isfinite(value)) {
    throw NumericalError("adaptive quadrature: non-finite integrand");
  }
  return {lo, hi, value, error};
}

double integrate_finite(const std::function<double(double)>& g, double lo,
                        double hi, double tolerance) {
  if (lo == hi) return 0.0;
  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod(g, lo, hi);
  double total = first.value;
  double total_error = first.error;
  heap.push(first);
  constexpr int kMaxSegments = 20000;
  int segments = 1;
  while (total_error > tolerance * std::max(1.0, std::abs(total))) {
    if (segments >= kMaxSegments) {
      throw NumericalError("adaptive quadrature: tolerance not reached");
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      // Interval can no longer be split in double precision.
      total_error -= worst.error;
      heap.push({worst.lo, worst.hi, worst.value, 0.0});
      if (heap.top().error == 0.0) break;
      continue;
    }
    const Segment left = gauss_kronrod(g, worst.lo, mid);
    const Segment right = gauss_kronrod(g, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++segments;
  }
  return total;
}

}  // namespace

const QuadratureRule& gauss_hermite_rule(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_hermite(n)).first;
  return it->second;
}

QuadratureRule adaptive_rule(std::vector<double> breakpoints,
                             double tolerance) {
  QuadratureRule rule;
  rule.kind = QuadratureKind::adaptive;
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                    breakpoints.end());
  rule.breakpoints = std::move(breakpoints);
  rule.tolerance = tolerance;
  return rule;
}

double adaptive_integrate(const std::function<double(double)>& g, double lo,
                          double hi, double tolerance) {
  if (std::isnan(lo) || std::isnan(hi)) {
    throw DomainError("adaptive_integrate: NaN limit");
  }
  if (lo > hi) return -adaptive_integrate(g, hi, lo, tolerance);
  if (lo == hi) return 0.0;
  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  if (!lo_inf && !hi_inf) return integrate_finite(g, lo, hi, tolerance);
  if (lo_inf && hi_inf) {
    // v = t / (1 - t^2), t in (-1, 1)
    auto h = [&g](double t) {
      const double s = 1.0 - t * t;
      const double gv = g(t / s);
      return gv == 0.0 ? 0.0 : gv * (1.0 + t * t) / (s * s);
    };
    return integrate_finite(h, -1.0, 1.0, tolerance);
  }
  if (hi_inf) {
    // v = lo + t / (1 - t), t in [0, 1)
    auto h = [&g, lo](double t) {
      const double s = 1.0 - t;
      const double gv = g(lo + t / s);
      return gv == 0.0 ? 0.0 : gv / (s * s);
    };
    return integrate_finite(h, 0.0, 1.0, tolerance);
  }
  // v = hi - (1 - t) / t, t in (0, 1]
  auto h = [&g, hi](double t) {
    const double gv = g(hi - (1.0 - t) / t);
    return gv == 0.0 ? 0.0 : gv / (t * t);
  };
  return integrate_finite(h, 0.0, 1.0, tolerance);
}

double integrate_against_normal(const std::function<double(double)>& f,
                                const QuadratureRule& rule) {
  if (rule.kind == QuadratureKind::gauss_hermite_normalized) {
    if (rule.nodes.empty() || rule.nodes.size() != rule.weights.size()) {
      throw DomainError("integrate_against_normal: malformed rule");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double value = f(rule.nodes[i]);
      if (!std::isfinite(value)) {
        throw NumericalError(
            "integrate_against_normal: integrand non-finite at node " +
            std::to_string(rule.nodes[i]));
      }
      sum += rule.weights[i] * value;
    }
    return sum;
  }

  auto weighted = [&f](double v) {
    const double density = normal_pdf(v);
    if (density == 0.0) return 0.0;
    const double value = f(v);
    if (!std::isfinite(value)) {
      throw NumericalError(
          "integrate_against_normal: integrand non-finite at " +
          std::to_string(v));
    }
    return value * density;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cuts;
  cuts.reserve(rule.breakpoints.size() + 2);
  cuts.push_back(-inf);
  for (double b : rule.breakpoints) {
    if (std::isfinite(b)) cuts.push_back(b);
  }
  cuts.push_back(inf);
  // Per-piece tolerance scaled so the pieces jointly meet the rule's target.
  const double piece_tol =
      rule.tolerance / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i] == cuts[i + 1]) continue;
    total += adaptive_integrate(weighted, cuts[i], cuts[i + 1],
                                std::max(piece_tol, 1e-15));
  }
  return total;
}

}  // namespace copula_exo
