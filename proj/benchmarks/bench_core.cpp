#include <benchmark/benchmark.h>

#include <cmath>

#include "ellspec/fourier.hpp"
#include "ellspec/jacobi.hpp"
#include "ellspec/nuclearity.hpp"
#include "ellspec/rng.hpp"
#include "ellspec/schatten.hpp"

using namespace ellspec;

static void BM_BuildSpectrum(benchmark::State& state) {
  const auto model = ManifoldModel::parse("so3-h2");
  for (auto _ : state)
    benchmark::DoNotOptimize(build_spectrum(model, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_BuildSpectrum)->Arg(1000)->Arg(6000);

static void BM_Jacobi(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Lcg rng(1);
  CMatrix a(n, n);
  for (auto& v : a.data()) v = rng.complex();
  const auto h = a + a.adjoint();
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_eigh(h, false));
}
BENCHMARK(BM_Jacobi)->Arg(16)->Arg(64)->Arg(128);

static void BM_SchattenBlockwise(benchmark::State& state) {
  const auto es = build_spectrum(ManifoldModel::parse("s3"), static_cast<std::size_t>(state.range(0)));
  Lcg rng(2);
  const auto sym = MatrixSymbol::random(es, rng);
  for (auto _ : state) benchmark::DoNotOptimize(schatten_blockwise(sym, 1.0));
}
BENCHMARK(BM_SchattenBlockwise)->Arg(6)->Arg(9);

static void BM_ForwardTransform(benchmark::State& state) {
  const auto es = build_spectrum(ManifoldModel::parse("s2"), static_cast<std::size_t>(state.range(0)));
  const auto grid = quadrature_grid(es.model(), required_resolution(es));
  const auto table = make_basis_table(es, grid);
  Lcg rng(3);
  const auto f = inverse_transform(random_coefficients(es, rng), es, grid, table);
  for (auto _ : state) benchmark::DoNotOptimize(forward_transform(f, es, grid, table));
}
BENCHMARK(BM_ForwardTransform)->Arg(8)->Arg(24);

static void BM_ClassifySeries(benchmark::State& state) {
  const auto es = build_spectrum(ManifoldModel::parse("su2-sub"), 4000);
  const auto terms =
      multiplicity_weighted_terms(es, [](double l) { return std::pow(1.0 + l, -2.4); });
  for (auto _ : state) benchmark::DoNotOptimize(classify_summability(terms));
}
BENCHMARK(BM_ClassifySeries);

static void BM_NuclearitySum(benchmark::State& state) {
  const auto es = build_spectrum(ManifoldModel::parse("s3"), 60);
  const auto probe = build_spectrum(es.model(), 12);
  const auto grid = quadrature_grid(probe.model(), required_resolution(probe, QuadratureRule::Lobatto),
                                    QuadratureRule::Lobatto);
  const auto ctl = lambda_control(probe, grid, ControlMode::HormanderFit);
  const auto sym = spectral_function_symbol(es, [](double l) { return std::pow(1.0 + l, -1.8); });
  for (auto _ : state) benchmark::DoNotOptimize(nuclearity_sum_basis_free(sym, es, 1.0, 2.0, 4.0, ctl));
}
BENCHMARK(BM_NuclearitySum);

BENCHMARK_MAIN();
