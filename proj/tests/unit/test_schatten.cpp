#include <cmath>

#include "doctest.h"
#include "ellspec/jacobi.hpp"
#include "ellspec/rng.hpp"
#include "ellspec/schatten.hpp"
#include "oracles.hpp"

using namespace ellspec;

namespace {

CMatrix random_matrix(std::size_t n, Lcg& rng) {
  CMatrix a(n, n);
  for (auto& v : a.data()) v = rng.complex();
  return a;
}

CMatrix random_unitary(std::size_t n, Lcg& rng) {
  const auto a = random_matrix(n, rng);
  return jacobi_eigh(a + a.adjoint()).vectors;
}

std::vector<LevelTerm> power_terms(const EigenStructure& es, double beta) {
  return multiplicity_weighted_terms(es, [&](double l) { return std::pow(1.0 + l, -beta); });
}

}  // namespace

TEST_CASE("singular value examples") {
  std::vector<Complex> d = {3.0, -4.0};
  const auto s = singular_values(CMatrix::diagonal(d)).values;
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx(4.0));
  CHECK(s[1] == doctest::Approx(3.0));
  CMatrix swap(2, 2);
  swap(0, 1) = 1.0;
  swap(1, 0) = 1.0;
  for (double v : singular_values(swap).values) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("singular values match the characteristic polynomial oracle") {
  Lcg rng(42);
  for (int t = 0; t < 5; ++t) {
    const auto a = random_matrix(5, rng);
    oracle::Mat m(5, std::vector<oracle::cd>(5));
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) m[i][j] = a(i, j);
    const auto expected = oracle::singular_values_charpoly(m);
    const auto got = singular_values(a).values;
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(got[i] - expected[i]) < 1e-8);
  }
}

TEST_CASE("singular values reject non-finite input") {
  CMatrix a(2, 2);
  a(0, 0) = std::nan("");
  CHECK_THROWS_AS(singular_values(a), Error);
}

TEST_CASE("Jacobi eigensolver diagonalises Hermitian matrices") {
  Lcg rng(1);
  const auto a = random_matrix(12, rng);
  const auto h = a + a.adjoint();
  const auto eig = jacobi_eigh(h);
  std::vector<Complex> d(eig.values.begin(), eig.values.end());
  CHECK((h * eig.vectors - eig.vectors * CMatrix::diagonal(d)).max_abs() < 1e-10);
  CHECK((eig.vectors.adjoint() * eig.vectors - CMatrix::identity(12)).max_abs() < 1e-12);
  for (std::size_t i = 1; i < eig.values.size(); ++i) CHECK(eig.values[i - 1] <= eig.values[i]);
}

TEST_CASE("blockwise Schatten examples") {
  const auto es = build_spectrum(ManifoldModel::parse("t1"), 3);
  CHECK(schatten_blockwise(MatrixSymbol::identity(es), 1.0) == doctest::Approx(5.0));
  auto sym = MatrixSymbol::zero(es);
  sym.block(1) = Block(std::vector<Complex>{2.0, 0.0});
  for (double r : {0.5, 1.0, 2.0}) CHECK(schatten_blockwise(sym, r) == doctest::Approx(std::pow(2.0, r)));
}

TEST_CASE("global Schatten examples") {
  CHECK(schatten_global(GlobalOperatorMatrix{CMatrix(6, 6)}, 1.0) == 0.0);
  Lcg rng(2);
  CHECK(schatten_global(GlobalOperatorMatrix{random_unitary(7, rng)}, 2.0) == doctest::Approx(7.0));
}

TEST_CASE("blockwise and global Schatten sums agree") {
  for (const char* id : {"t1", "t2", "s2", "s3", "su2-sub", "so3-h2"}) {
    const auto es = build_spectrum(ManifoldModel::parse(id), 5);
    Lcg rng(3);
    for (int t = 0; t < 10; ++t) {
      const auto sym = MatrixSymbol::random(es, rng);
      const auto g = to_global(sym, es);
      for (double r : {0.5, 1.0, 2.0}) {
        const double global = schatten_global(g, r);
        CHECK(std::abs(schatten_blockwise(sym, r) - global) < 1e-10 * (1.0 + global));
      }
    }
  }
}

TEST_CASE("trace examples") {
  const auto es = build_spectrum(ManifoldModel::parse("t1"), 3);
  CHECK(trace_from_symbol(MatrixSymbol::identity(es)) == Complex(5.0));
  const auto g = [](double l) { return std::exp(-l); };
  double expected = 0.0;
  for (const auto& lev : es.levels()) expected += static_cast<double>(lev.multiplicity) * g(lev.lambda);
  CHECK(trace_from_symbol(spectral_function_symbol(es, g)).real() == doctest::Approx(expected));
  const auto s2 = build_spectrum(ManifoldModel::parse("s2"), 5);
  Lcg rng(4);
  const auto sym = MatrixSymbol::random(s2, rng);
  CHECK(std::abs(trace_from_symbol(sym) - to_global(sym, s2).entries.trace()) < 1e-12);
}

TEST_CASE("classifier on closed-form circle series") {
  const auto es = build_spectrum(ManifoldModel::parse("t1"), 4000);
  // d (1+lambda)^{-1} with lambda = j^2: block sums decay like 2^{-k/2}.
  const auto v = classify_summability(power_terms(es, 1.0));
  CHECK(v.verdict == Verdict::Convergent);
  CHECK(v.fitted_exponent == doctest::Approx(-0.5).epsilon(0.1));
  const auto h = classify_summability(power_terms(es, 0.5));
  CHECK(h.verdict != Verdict::Convergent);
  CHECK(std::abs(h.fitted_exponent) < 0.1);
  std::vector<LevelTerm> constant;
  for (const auto& lev : es.levels()) constant.push_back({lev.lambda, 1.0});
  CHECK(classify_summability(constant).verdict == Verdict::Divergent);
}

TEST_CASE("classifier refuses to guess with too few blocks") {
  const auto es = build_spectrum(ManifoldModel::parse("t1"), 3);
  const auto v = classify_summability(power_terms(es, 3.0));
  CHECK(v.verdict == Verdict::Inconclusive);
  CHECK_FALSE(v.diagnostics.empty());
}

TEST_CASE("classifier treats an all-zero series as convergent") {
  const auto es = build_spectrum(ManifoldModel::parse("s2"), 200);
  std::vector<LevelTerm> zeros;
  for (const auto& lev : es.levels()) zeros.push_back({lev.lambda, 0.0});
  const auto v = classify_summability(zeros);
  CHECK(v.verdict == Verdict::Convergent);
  CHECK(v.partial_sum == 0.0);
}

TEST_CASE("classifier verdicts 20% either side of the exact boundary") {
  struct Case {
    const char* id;
    std::size_t levels;
    double weyl_exponent;  // count ~ lambda^w
    double margin;
  };
  // Circle slopes are +-0.1 at 20%, inside the default margin.
  for (const auto& c : {Case{"t1", 4000, 0.5, 0.05}, Case{"t2", 3000, 1.0, kDefaultMargin},
                        Case{"s2", 1000, 1.0, kDefaultMargin}, Case{"s3", 200, 1.5, kDefaultMargin},
                        Case{"su2-sub", 4000, 2.0, kDefaultMargin},
                        Case{"so3-h2", 6000, 2.0, kDefaultMargin}}) {
    const auto es = build_spectrum(ManifoldModel::parse(c.id), c.levels);
    const double boundary = oracle::series_boundary(c.weyl_exponent);
    CAPTURE(c.id);
    CHECK(classify_summability(power_terms(es, 1.2 * boundary), c.margin).verdict ==
          Verdict::Convergent);
    CHECK(classify_summability(power_terms(es, 0.8 * boundary), c.margin).verdict ==
          Verdict::Divergent);
  }
}

TEST_CASE("Schatten quasi-norms decrease in r") {
  Lcg rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto s = singular_values(random_matrix(6, rng));
    const std::vector<double> rs = {0.25, 0.5, 1.0, 1.5, 2.0, 4.0};
    for (std::size_t i = 1; i < rs.size(); ++i)
      CHECK(s.quasi_norm(rs[i]) <= s.quasi_norm(rs[i - 1]) * (1.0 + 1e-14));
  }
}

TEST_CASE("singular values are unitarily invariant") {
  Lcg rng(6);
  for (int t = 0; t < 5; ++t) {
    const auto a = random_matrix(6, rng);
    const auto u = random_unitary(6, rng), v = random_unitary(6, rng);
    const auto s1 = singular_values(a).values;
    const auto s2 = singular_values(u * a * v).values;
    for (std::size_t i = 0; i < s1.size(); ++i) CHECK(std::abs(s1[i] - s2[i]) < 1e-10);
  }
}

TEST_CASE("singular values of diagonal blocks") {
  const auto s = singular_values(Block(std::vector<Complex>{Complex(0, -2), 1.0, Complex(3, 4)})).values;
  REQUIRE(s.size() == 3);
  CHECK(s[0] == doctest::Approx(5.0));
  CHECK(s[1] == doctest::Approx(2.0));
  CHECK(s[2] == doctest::Approx(1.0));
}
