#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ellspec/nuclearity.hpp"
#include "ellspec/rng.hpp"

using namespace ellspec;
using std::numbers::pi;

namespace {

EigenStructure spectrum(const char* id, std::size_t levels) {
  return build_spectrum(ManifoldModel::parse(id), levels);
}

QuadratureGrid probe_grid(const EigenStructure& es) {
  return quadrature_grid(es.model(), required_resolution(es, QuadratureRule::Lobatto),
                         QuadratureRule::Lobatto);
}

LambdaControl fitted(const char* id, std::size_t probe_levels = 12) {
  const auto probe = spectrum(id, probe_levels);
  return lambda_control(probe, probe_grid(probe), ControlMode::HormanderFit);
}

MatrixSymbol bessel(const EigenStructure& es, double alpha) {
  return spectral_function_symbol(es, [&](double l) { return std::pow(1.0 + l, -alpha / 2.0); });
}

}  // namespace

TEST_CASE("p tilde examples") {
  CHECK(p_tilde(2.0) == 0.0);
  CHECK(p_tilde(4.0) == 0.5);
  CHECK(p_tilde(kInfinity) == 1.0);
  CHECK(p_tilde(1.0) == 0.0);
  CHECK_THROWS_AS(p_tilde(0.5), Error);
}

TEST_CASE("p tilde is monotone, continuous at 2 and tends to 1") {
  double prev = 0.0;
  for (double p = 1.0; p < 1e6; p *= 1.1) {
    CHECK(p_tilde(p) >= prev);
    prev = p_tilde(p);
  }
  CHECK(p_tilde(2.0 + 1e-12) < 1e-11);
  CHECK(p_tilde(1e9) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("dual exponents") {
  CHECK(dual_exponent(2.0) == 2.0);
  CHECK(dual_exponent(4.0) == doctest::Approx(4.0 / 3.0));
  CHECK(std::isinf(dual_exponent(1.0)));
  CHECK(dual_exponent(kInfinity) == 1.0);
}

TEST_CASE("empirical control on the circle") {
  const auto es = spectrum("t1", 8);
  const auto ctl = lambda_control(es, quadrature_grid(es.model(), 64), ControlMode::Empirical);
  for (std::size_t l = 1; l < es.level_cap(); ++l)
    for (std::size_t m = 0; m < 2; ++m)
      CHECK(std::abs(ctl.at(l, m, es.level(l).lambda) - 1.0 / std::sqrt(pi)) < 1e-10);
  CHECK_THROWS_AS(ctl.at(20, 0, 400.0), Error);
}

TEST_CASE("empirical control of zonal harmonics on the two-sphere") {
  const auto es = spectrum("s2", 10);
  const auto ctl = lambda_control(es, probe_grid(es), ControlMode::Empirical);
  for (std::size_t l = 0; l < es.level_cap(); ++l) {
    // zonal function is m = 0, stored at index l
    const double expected = std::sqrt((2.0 * static_cast<double>(l) + 1.0) / (4.0 * pi));
    CHECK(std::abs(ctl.at(l, l, es.level(l).lambda) - expected) < 1e-6);
  }
}

TEST_CASE("sup-norm growth obeys the local Weyl exponent") {
  for (const auto& [id, n] : {std::pair{"s2", 2.0}, std::pair{"s3", 3.0}}) {
    const auto es = spectrum(id, 12);
    const auto ctl = lambda_control(es, probe_grid(es), ControlMode::HormanderFit);
    const double bound_exp = (n - 1.0) / 4.0;
    CHECK(ctl.exponent == doctest::Approx(bound_exp));
    CHECK(sup_norm_growth_exponent(ctl) <= bound_exp + 0.1);
    for (std::size_t l = 0; l < es.level_cap(); ++l)
      for (double v : ctl.per_index[l])
        CHECK(v <= ctl.fitted_C * std::pow(1.0 + es.level(l).lambda, ctl.exponent) * (1 + 1e-12));
  }
}

TEST_CASE("lambda control requires evaluators") {
  const auto es = spectrum("su2-sub", 4);
  const auto t1 = spectrum("t1", 4);
  CHECK_THROWS_AS(lambda_control(es, quadrature_grid(t1.model(), 16), ControlMode::Empirical), Error);
}

TEST_CASE("nuclearity sums with p1 = p2 = 2 are entrywise sums") {
  const auto es = spectrum("s2", 6);
  Lcg rng(1);
  const auto sym = MatrixSymbol::random(es, rng);
  const auto ctl = fitted("s2");
  for (double r : {0.5, 1.0}) {
    double expected = 0.0;
    for (const auto& b : sym.blocks())
      b.for_each_entry([&](std::size_t, std::size_t, Complex v) { expected += std::pow(std::abs(v), r); });
    CHECK(nuclearity_sum(sym, es, r, 2.0, 2.0, ctl).value == doctest::Approx(expected));
  }
}

TEST_CASE("circle Bessel symbol is nuclear for alpha = 3") {
  const auto es = spectrum("t1", 3000);
  const auto sum = nuclearity_sum(bessel(es, 3.0), es, 1.0, 2.0, 2.0, fitted("t1"));
  CHECK(sum.verdict.verdict == Verdict::Convergent);
}

TEST_CASE("zero symbol gives an empty, convergent sum") {
  const auto es = spectrum("s2", 200);
  const auto sum = nuclearity_sum(MatrixSymbol::zero(es), es, 1.0, 2.0, 4.0, fitted("s2"));
  CHECK(sum.value == 0.0);
  CHECK(sum.verdict.verdict == Verdict::Convergent);
}

TEST_CASE("three-sphere Bessel potentials across the predicted threshold") {
  const auto es = spectrum("s3", 60);
  const auto ctl = fitted("s3");
  const auto run = [&](double alpha, double r, double p1, double p2) {
    return nuclearity_sum_basis_free(bessel(es, alpha), es, r, p1, p2, ctl).verdict.verdict;
  };
  CHECK(run(3.6, 1.0, 2.0, 2.0) == Verdict::Convergent);
  CHECK(run(2.4, 1.0, 2.0, 2.0) == Verdict::Divergent);
  const double t = s3_bessel_nuclearity_threshold(1.0, 2.0, 4.0);
  CHECK(t == doctest::Approx(3.25));
  CHECK(run(1.2 * t, 1.0, 2.0, 4.0) == Verdict::Convergent);
  CHECK(run(0.8 * t, 1.0, 2.0, 4.0) == Verdict::Divergent);
}

TEST_CASE("identity symbol fails the sufficient condition") {
  const auto es = spectrum("s3", 60);
  const auto sum = nuclearity_sum_basis_free(MatrixSymbol::identity(es), es, 1.0, 2.0, 2.0, fitted("s3"));
  CHECK(sum.verdict.verdict == Verdict::Divergent);
}

TEST_CASE("basis-free and entrywise sums agree on diagonal Hermitian symbols") {
  const auto es = spectrum("s3", 30);
  const auto ctl = fitted("s3");
  Lcg rng(2);
  std::vector<Block> blocks;
  for (const auto& lev : es.levels()) {
    std::vector<Complex> d(lev.multiplicity);
    for (auto& v : d) v = rng.symmetric();
    blocks.emplace_back(std::move(d));
  }
  const MatrixSymbol sym(es.model().id(), std::move(blocks));
  for (const auto& [p1, p2] : {std::pair{2.0, 2.0}, std::pair{2.0, 4.0}, std::pair{1.5, 3.0}}) {
    const double a = nuclearity_sum(sym, es, 0.7, p1, p2, ctl).value;
    const double b = nuclearity_sum_basis_free(sym, es, 0.7, p1, p2, ctl).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("nuclearity sum argument checks") {
  const auto es = spectrum("s2", 5);
  const auto ctl = fitted("s2");
  Lcg rng(3);
  const auto sym = MatrixSymbol::random(es, rng);
  CHECK_THROWS_AS(nuclearity_sum(sym, es, 1.5, 2.0, 2.0, ctl), Error);
  CHECK_THROWS_AS(nuclearity_sum(sym, es, 0.0, 2.0, 2.0, ctl), Error);
  CHECK_THROWS_AS(nuclearity_sum_basis_free(sym, es, 1.0, 2.0, 2.0, ctl), Error);
}

TEST_CASE("decomposition of the identity on one circle level") {
  const auto es = spectrum("t1", 1);
  const auto grid = quadrature_grid(es.model(), 8);
  const auto dec = nuclear_decomposition(MatrixSymbol::identity(es), es, grid, 1.0, 2.0, 2.0);
  REQUIRE(dec.vectors.size() == 1);
  const double c = 1.0 / std::sqrt(2.0 * pi);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(dec.vectors[0].samples[i] - c) < 1e-15);
    CHECK(std::abs(dec.functionals[0].samples[i] - c) < 1e-15);
  }
  GridFunction f{std::vector<Complex>(grid.size(), Complex(2.0, 1.0) * c)};
  const auto g = dec.apply(f, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(g.samples[i] - f.samples[i]) < 1e-14);
}

TEST_CASE("rank-one circle symbol has a one-term decomposition") {
  const auto es = spectrum("t1", 2);
  const auto grid = quadrature_grid(es.model(), 16);
  auto sym = MatrixSymbol::zero(es);
  CMatrix b(2, 2);
  b(0, 1) = Complex(0.0, -3.0);
  sym.block(1) = Block(b);
  const double r = 0.6, p1 = 1.5, p2 = 3.0;
  const auto dec = nuclear_decomposition(sym, es, grid, r, p1, p2);
  REQUIRE(dec.vectors.size() == 1);
  // one-term hand computation with grid norms of sin (functional) and cos (vector)
  double nq = 0.0, np = 0.0;
  const double q1 = p1 / (p1 - 1.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.points[i][0];
    nq += grid.weights[i] * std::pow(std::abs(std::sin(x)) / std::sqrt(pi), q1);
    np += grid.weights[i] * std::pow(std::abs(std::cos(x)) / std::sqrt(pi), p2);
  }
  const double expected = std::pow(std::pow(nq, 1.0 / q1) * std::pow(np, 1.0 / p2) * 3.0, r);
  CHECK(dec.r_sum == doctest::Approx(expected));
}

TEST_CASE("decomposition reproduces the quantized action") {
  for (const char* id : {"t1", "t2", "s2", "s3"}) {
    const auto es = spectrum(id, 4);
    const auto grid = quadrature_grid(es.model(), required_resolution(es));
    Lcg rng(4);
    const auto sym = MatrixSymbol::random(es, rng);
    const auto dec = nuclear_decomposition(sym, es, grid, 1.0, 2.0, 2.0);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const auto coeffs = random_coefficients(es, rng);
      const auto f = inverse_transform(coeffs, es, grid);
      const auto expected = inverse_transform(quantize(sym, coeffs), es, grid);
      const auto got = dec.apply(f, grid);
      for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(got.samples[i] - expected.samples[i]));
    }
    CAPTURE(id);
    CHECK(worst < 1e-8);
  }
}
