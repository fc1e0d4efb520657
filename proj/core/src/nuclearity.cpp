#include "ellspec/nuclearity.hpp"

#include <algorithm>
#include <cmath>

namespace ellspec {

namespace {

void check_exponents(double r, double p1, double p2) {
  if (!(r > 0.0 && r <= 1.0)) throw Error("r-nuclearity requires 0 < r <= 1");
  if (!(p1 >= 1.0 && p1 < kInfinity) || !(p2 >= 1.0 && p2 < kInfinity))
    throw Error("r-nuclearity sums require 1 <= p1, p2 < infinity");
}

}  // namespace

double p_tilde(double p) {
  if (std::isnan(p) || p < 1.0) throw Error("p_tilde: p must be >= 1");
  if (std::isinf(p)) return 1.0;
  if (p <= 2.0) return 0.0;
  return (p - 2.0) / p;
}

double dual_exponent(double p) {
  if (std::isnan(p) || p < 1.0) throw Error("dual_exponent: p must be >= 1");
  if (p == 1.0) return kInfinity;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

double LambdaControl::at(std::size_t level, std::size_t m, double lambda) const {
  if (mode == ControlMode::HormanderFit) return fitted_C * std::pow(1.0 + lambda, exponent);
  if (level >= per_index.size() || m >= per_index[level].size())
    throw Error("empirical Lambda control does not cover level " + std::to_string(level));
  return per_index[level][m];
}

double LambdaControl::level_value(std::size_t level, double lambda) const {
  if (mode == ControlMode::HormanderFit) return fitted_C * std::pow(1.0 + lambda, exponent);
  if (level >= per_index.size())
    throw Error("empirical Lambda control does not cover level " + std::to_string(level));
  return *std::max_element(per_index[level].begin(), per_index[level].end());
}

LambdaControl lambda_control(const EigenStructure& es, const QuadratureGrid& grid,
                             ControlMode mode) {
  if (!es.has_evaluators())
    throw Error("lambda_control: model '" + es.model().id() + "' is spectral-only");
  if (grid.kind != es.model().kind) throw Error("lambda_control: grid belongs to another model");
  LambdaControl ctl;
  ctl.mode = mode;
  ctl.exponent = (es.model().dimension - 1.0) / (2.0 * es.model().order);
  for (const auto& lev : es.levels()) {
    ctl.per_index.emplace_back(lev.multiplicity, 0.0);
    ctl.lambdas.push_back(lev.lambda);
  }
  std::vector<Complex> vals(es.dimension());
  for (const auto& x : grid.points) {
    es.eval_all(x, vals);
    for (std::size_t l = 0; l < es.level_cap(); ++l)
      for (std::size_t m = 0; m < es.level(l).multiplicity; ++m) {
        auto& slot = ctl.per_index[l][m];
        slot = std::max(slot, std::abs(vals[es.offset(l) + m]));
      }
  }
  for (std::size_t l = 0; l < es.level_cap(); ++l) {
    const double mx = *std::max_element(ctl.per_index[l].begin(), ctl.per_index[l].end());
    ctl.fitted_C = std::max(ctl.fitted_C, mx / std::pow(1.0 + ctl.lambdas[l], ctl.exponent));
  }
  return ctl;
}

double sup_norm_growth_exponent(const LambdaControl& ctl) {
  std::vector<double> xs, ys;
  for (std::size_t l = 1; l < ctl.per_index.size(); ++l) {
    const double mx = *std::max_element(ctl.per_index[l].begin(), ctl.per_index[l].end());
    xs.push_back(std::log(1.0 + ctl.lambdas[l]));
    ys.push_back(std::log(mx));
  }
  if (xs.size() < 2) throw Error("sup_norm_growth_exponent: need at least three probed levels");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

NuclearitySum nuclearity_sum(const MatrixSymbol& sym, const EigenStructure& es, double r,
                             double p1, double p2, const LambdaControl& ctl, double margin) {
  check_exponents(r, p1, p2);
  sym.check_shape(es);
  const double a = p_tilde(p2) * r;
  const double b = p_tilde(dual_exponent(p1)) * r;
  std::vector<LevelTerm> terms;
  terms.reserve(es.level_cap());
  for (std::size_t l = 0; l < es.level_cap(); ++l) {
    const double lam = es.level(l).lambda;
    double t = 0.0;
    sym.block(l).for_each_entry([&](std::size_t m, std::size_t k, const Complex& v) {
      const double mag = std::abs(v);
      if (mag == 0.0) return;
      t += std::pow(mag, r) * std::pow(ctl.at(l, m, lam), a) * std::pow(ctl.at(l, k, lam), b);
    });
    terms.push_back({lam, t});
  }
  NuclearitySum out;
  out.verdict = classify_summability(terms, margin);
  out.value = out.verdict.partial_sum;
  return out;
}

NuclearitySum nuclearity_sum_basis_free(const MatrixSymbol& sym, const EigenStructure& es,
                                        double r, double p1, double p2,
                                        const LambdaControl& ctl, double margin) {
  check_exponents(r, p1, p2);
  sym.check_shape(es);
  for (std::size_t l = 0; l < es.level_cap(); ++l)
    if (sym.block(l).hermitian_defect() > 1e-10)
      throw Error("nuclearity_sum_basis_free: block " + std::to_string(l) +
                  " is not Hermitian (formal self-adjointness required)");
  const double w = (p_tilde(p2) + p_tilde(dual_exponent(p1))) * r;
  std::vector<LevelTerm> terms;
  terms.reserve(es.level_cap());
  for (std::size_t l = 0; l < es.level_cap(); ++l) {
    const double lam = es.level(l).lambda;
    const double sr = singular_values(sym.block(l)).power_sum(r);
    terms.push_back({lam, sr == 0.0 ? 0.0 : sr * std::pow(ctl.level_value(l, lam), w)});
  }
  NuclearitySum out;
  out.verdict = classify_summability(terms, margin);
  out.value = out.verdict.partial_sum;
  return out;
}

double s3_bessel_nuclearity_threshold(double r, double p1, double p2) {
  if (!(r > 0.0)) throw Error("r must be positive");
  return 3.0 / r + 0.5 * (p_tilde(p2) + p_tilde(dual_exponent(p1)));
}

GridFunction NuclearDecomposition::apply(const GridFunction& f, const QuadratureGrid& grid) const {
  if (f.samples.size() != grid.size()) throw Error("NuclearDecomposition::apply: size mismatch");
  GridFunction out{std::vector<Complex>(grid.size())};
  for (std::size_t n = 0; n < functionals.size(); ++n) {
    Complex pairing{};
    const auto& xf = functionals[n].samples;
    for (std::size_t i = 0; i < grid.size(); ++i) pairing += grid.weights[i] * f.samples[i] * xf[i];
    if (pairing == Complex{}) continue;
    const auto& y = vectors[n].samples;
    for (std::size_t i = 0; i < grid.size(); ++i) out.samples[i] += pairing * y[i];
  }
  return out;
}

NuclearDecomposition nuclear_decomposition(const MatrixSymbol& sym, const EigenStructure& es,
                                           const QuadratureGrid& grid, double r, double p1,
                                           double p2) {
  check_exponents(r, p1, p2);
  sym.check_shape(es);
  const auto table = make_basis_table(es, grid);
  const double q1 = dual_exponent(p1);
  const auto column = [&](std::size_t flat) {
    GridFunction g{std::vector<Complex>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) g.samples[i] = table.values(i, flat);
    return g;
  };
  NuclearDecomposition dec;
  for (std::size_t l = 0; l < es.level_cap(); ++l) {
    const auto off = es.offset(l);
    sym.block(l).for_each_entry([&](std::size_t m, std::size_t k, const Complex& v) {
      if (v == Complex{}) return;
      GridFunction fn = column(off + k);
      for (auto& s : fn.samples) s = std::conj(s);
      GridFunction vec = column(off + m);
      for (auto& s : vec.samples) s *= v;
      const double norms = grid_lp_norm(fn, grid, q1) * grid_lp_norm(vec, grid, p2);
      dec.r_sum += std::pow(norms, r);
      dec.functionals.push_back(std::move(fn));
      dec.vectors.push_back(std::move(vec));
    });
  }
  return dec;
}

}  // namespace ellspec
