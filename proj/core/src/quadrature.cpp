#include "ellspec/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "ellspec/matrix.hpp"

namespace ellspec {

LegendreValue legendre(std::size_t n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p0 = 1.0;
  double p1 = x;
  for (std::size_t k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
    p0 = p1;
    p1 = p2;
  }
  const double nn = static_cast<double>(n);
  double dp;
  if (std::abs(1.0 - x * x) < 1e-300) {
    // P_n'(+-1) = (+-1)^{n+1} n(n+1)/2
    dp = 0.5 * nn * (nn + 1.0) * ((x > 0 || n % 2 == 1) ? 1.0 : -1.0);
  } else {
    dp = nn * (x * p1 - p0) / (x * x - 1.0);
  }
  return {p1, dp};
}

Rule1d gauss_legendre(std::size_t n) {
  if (n == 0) throw Error("gauss_legendre: need at least one node");
  Rule1d rule{std::vector<double>(n), std::vector<double>(n)};
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nn + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto v = legendre(n, x);
      const double dx = v.p / v.dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto v = legendre(n, x);
    const double w = 2.0 / ((1.0 - x * x) * v.dp * v.dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

Rule1d gauss_lobatto(std::size_t n) {
  if (n < 2) throw Error("gauss_lobatto: need at least two nodes");
  const std::size_t m = n - 1;  // interior nodes are the roots of P_m'
  const double mm = static_cast<double>(m);
  Rule1d rule{std::vector<double>(n), std::vector<double>(n)};
  rule.nodes.front() = -1.0;
  rule.nodes.back() = 1.0;
  for (std::size_t i = 1; i < n - 1; ++i) {
    // Chebyshev-Gauss-Lobatto starting guess, Newton on P_m'.
    double x = -std::cos(std::numbers::pi * static_cast<double>(i) / mm);
    for (int iter = 0; iter < 100; ++iter) {
      const auto v = legendre(m, x);
      // (1-x^2) P'' = 2x P' - m(m+1) P
      const double d2 = (2.0 * x * v.dp - mm * (mm + 1.0) * v.p) / (1.0 - x * x);
      const double dx = v.dp / d2;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double p = legendre(m, rule.nodes[i]).p;
    rule.weights[i] = 2.0 / (mm * (mm + 1.0) * p * p);
  }
  return rule;
}

}  // namespace ellspec
