#include "ellspec/fourier.hpp"

#include <cmath>
#include <limits>

#include "ellspec/rng.hpp"

namespace ellspec {

namespace {

void check_grid(const EigenStructure& es, const QuadratureGrid& grid) {
  if (!es.has_evaluators())
    throw Error("model '" + es.model().id() + "' has no eigenfunction evaluators");
  if (grid.kind != es.model().kind) throw Error("quadrature grid belongs to another model");
  if (es.max_lambda() > grid.max_exact_lambda)
    throw Error("grid resolution " + std::to_string(grid.resolution) +
                " is below the band limit of the retained levels");
}

void check_samples(const GridFunction& f, const QuadratureGrid& grid) {
  if (f.samples.size() != grid.size())
    throw Error("grid function has " + std::to_string(f.samples.size()) +
                " samples but the grid has " + std::to_string(grid.size()) + " points");
}

}  // namespace

FourierCoefficients::FourierCoefficients(std::string model_id,
                                         std::vector<std::vector<Complex>> per_level)
    : model_id_(std::move(model_id)), per_level_(std::move(per_level)) {}

FourierCoefficients FourierCoefficients::zeros(const EigenStructure& es) {
  std::vector<std::vector<Complex>> per_level;
  for (const auto& lev : es.levels()) per_level.emplace_back(lev.multiplicity);
  return {es.model().id(), std::move(per_level)};
}

FourierCoefficients FourierCoefficients::from_flat(const EigenStructure& es,
                                                   std::span<const Complex> flat) {
  if (flat.size() != es.dimension()) throw Error("from_flat: length mismatch");
  auto out = zeros(es);
  for (std::size_t l = 0; l < es.level_cap(); ++l)
    for (std::size_t k = 0; k < es.level(l).multiplicity; ++k)
      out.per_level_[l][k] = flat[es.offset(l) + k];
  return out;
}

std::vector<Complex> FourierCoefficients::flatten() const {
  std::vector<Complex> out;
  for (const auto& v : per_level_) out.insert(out.end(), v.begin(), v.end());
  return out;
}

double FourierCoefficients::squared_norm() const {
  double s = 0.0;
  for (const auto& v : per_level_)
    for (const auto& c : v) s += std::norm(c);
  return s;
}

void FourierCoefficients::check_shape(const EigenStructure& es) const {
  if (model_id_ != es.model().id() || per_level_.size() != es.level_cap())
    throw Error("Fourier coefficients do not match the eigenstructure");
  for (std::size_t l = 0; l < per_level_.size(); ++l)
    if (per_level_[l].size() != es.level(l).multiplicity)
      throw Error("Fourier coefficients: level " + std::to_string(l) + " has wrong length");
}

BasisTable make_basis_table(const EigenStructure& es, const QuadratureGrid& grid) {
  check_grid(es, grid);
  BasisTable t{CMatrix(grid.size(), es.dimension())};
  for (std::size_t i = 0; i < grid.size(); ++i) es.eval_all(grid.points[i], t.values.row(i));
  return t;
}

FourierCoefficients forward_transform(const GridFunction& f, const EigenStructure& es,
                                      const QuadratureGrid& grid) {
  return forward_transform(f, es, grid, make_basis_table(es, grid));
}

FourierCoefficients forward_transform(const GridFunction& f, const EigenStructure& es,
                                      const QuadratureGrid& grid, const BasisTable& table) {
  check_samples(f, grid);
  const std::size_t n = es.dimension();
  if (table.values.rows() != grid.size() || table.values.cols() != n)
    throw Error("basis table does not match grid and eigenstructure");
  std::vector<Complex> flat(n);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Complex wf = grid.weights[i] * f.samples[i];
    const auto row = table.values.row(i);
    for (std::size_t j = 0; j < n; ++j) flat[j] += wf * std::conj(row[j]);
  }
  return FourierCoefficients::from_flat(es, flat);
}

GridFunction inverse_transform(const FourierCoefficients& coeffs, const EigenStructure& es,
                               const QuadratureGrid& grid) {
  return inverse_transform(coeffs, es, grid, make_basis_table(es, grid));
}

GridFunction inverse_transform(const FourierCoefficients& coeffs, const EigenStructure& es,
                               const QuadratureGrid& grid, const BasisTable& table) {
  coeffs.check_shape(es);
  const auto flat = coeffs.flatten();
  if (table.values.rows() != grid.size() || table.values.cols() != flat.size())
    throw Error("basis table does not match grid and eigenstructure");
  return {table.values.apply(flat)};
}

double plancherel_defect(const GridFunction& f, const EigenStructure& es,
                         const QuadratureGrid& grid) {
  const auto coeffs = forward_transform(f, es, grid);
  return std::abs(grid_norm2(f, grid) - coeffs.squared_norm());
}

Complex grid_inner(const GridFunction& f, const GridFunction& g, const QuadratureGrid& grid) {
  check_samples(f, grid);
  check_samples(g, grid);
  Complex s{};
  for (std::size_t i = 0; i < grid.size(); ++i)
    s += grid.weights[i] * f.samples[i] * std::conj(g.samples[i]);
  return s;
}

double grid_norm2(const GridFunction& f, const QuadratureGrid& grid) {
  check_samples(f, grid);
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weights[i] * std::norm(f.samples[i]);
  return s;
}

double grid_lp_norm(const GridFunction& f, const QuadratureGrid& grid, double p) {
  check_samples(f, grid);
  if (!(p >= 1.0)) throw Error("grid_lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.samples) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    s += grid.weights[i] * std::pow(std::abs(f.samples[i]), p);
  return std::pow(s, 1.0 / p);
}

FourierCoefficients random_coefficients(const EigenStructure& es, Lcg& rng) {
  auto c = FourierCoefficients::zeros(es);
  for (std::size_t l = 0; l < es.level_cap(); ++l)
    for (auto& v : c.level(l)) v = rng.complex();
  return c;
}

}  // namespace ellspec
