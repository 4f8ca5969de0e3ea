#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace copula_exo {

enum class QuadratureKind { gauss_hermite_normalized, adaptive };

/// Rule for integrals of the form  ∫ f(v) phi(v) dv  with phi the standard
/// normal density.
///
/// For `gauss_hermite_normalized` the weights already include phi and sum to
/// one, so the integral is approximated by sum_i w_i f(v_i). For `adaptive`
/// the nodes/weights are unused; the integral is computed by globally
/// adaptive Gauss-Kronrod on the real line split at `breakpoints`, which
/// should hold any discontinuities of f.
struct QuadratureRule {
  QuadratureKind kind = QuadratureKind::gauss_hermite_normalized;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> breakpoints;
  double tolerance = 1e-11;
};

/// n-point probabilists' Gauss-Hermite rule (exact for polynomials of degree
/// <= 2n - 1 against the standard normal density). Rules are cached.
const QuadratureRule& gauss_hermite_rule(std::size_t n = 128);

/// Adaptive rule with optional breakpoints (sorted internally).
QuadratureRule adaptive_rule(std::vector<double> breakpoints = {},
                             double tolerance = 1e-11);

/// ∫ f(v) phi(v) dv under `rule`. Throws NumericalError when f is non-finite
/// at a node or the adaptive scheme fails to reach its tolerance.
double integrate_against_normal(const std::function<double(double)>& f,
                                const QuadratureRule& rule);

/// Adaptive Gauss-Kronrod (7/15) integral of g over [lo, hi]; either end may
/// be infinite.
double adaptive_integrate(const std::function<double(double)>& g, double lo,
                          double hi, double tolerance = 1e-11);

}  // namespace copula_exo
