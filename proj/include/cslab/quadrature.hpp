#pragma once

#include <array>
#include <cmath>
#include <functional>

namespace cslab::detail {

/// Gauss-Legendre nodes/weights on [-1,1], computed once by Newton iteration
/// on the Legendre recurrence.
template <int Order>
struct GaussRule {
  std::array<double, Order> x{};
  std::array<double, Order> w{};

  GaussRule() {
    const int n = Order;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = xi;
        for (int j = 2; j <= n; ++j) {
          double p2 = ((2.0 * j - 1.0) * xi * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        double dx = p1 / pp;
        xi -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      x[i] = -xi;
      x[n - 1 - i] = xi;
      w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * pp * pp);
    }
  }

  double integrate(double lo, double hi, const std::function<double(double)>& f) const {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (int i = 0; i < Order; ++i) acc += w[i] * f(mid + half * x[i]);
    return acc * half;
  }
};

inline const GaussRule<32>& gauss32() {
  static const GaussRule<32> rule;
  return rule;
}

/// Exact integral of (sin t)^a cos t over [t0, t1] via the antiderivative
/// sin^{a+1}/(a+1).
inline double sin_pow_cos_integral(double a, double t0, double t1) {
  return (std::pow(std::sin(t1), a + 1.0) - std::pow(std::sin(t0), a + 1.0)) / (a + 1.0);
}

/// Integral of (sin t)^a / cos t over [t0, t1], t1 < pi/2. Substituting
/// u = sin t gives int u^a/(1-u^2) du; the u^a part integrates exactly and the
/// smooth remainder u^{a+2}/(1-u^2) goes to Gauss quadrature, so the equator
/// endpoint singularity of u^a (a < 0) never meets the quadrature rule.
inline double sin_pow_over_cos_integral(double a, double t0, double t1) {
  const double u0 = std::sin(t0), u1 = std::sin(t1);
  const double exact = (std::pow(u1, a + 1.0) - std::pow(u0, a + 1.0)) / (a + 1.0);
  const double rest = gauss32().integrate(
      u0, u1, [a](double u) { return std::pow(u, a + 2.0) / (1.0 - u * u); });
  return exact + rest;
}

}  // namespace cslab::detail
