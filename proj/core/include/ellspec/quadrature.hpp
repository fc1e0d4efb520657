#pragma once

#include <cstddef>
#include <vector>

namespace ellspec {

/// One-dimensional rule on [-1, 1].
struct Rule1d {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree <= 2n-1.
Rule1d gauss_legendre(std::size_t n);

/// n-point Gauss-Lobatto rule (endpoints included, n >= 2), exact for
/// polynomials of degree <= 2n-3.
Rule1d gauss_lobatto(std::size_t n);

/// Legendre polynomial P_n(x) and its derivative.
struct LegendreValue {
  double p;
  double dp;
};
LegendreValue legendre(std::size_t n, double x);

}  // namespace ellspec
