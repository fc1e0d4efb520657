#include "ellspec/kernel_ops.hpp"

#include <algorithm>
#include <cmath>

#include "ellspec/fourier.hpp"
#include "ellspec/rng.hpp"

namespace ellspec {

KernelRep::KernelRep(std::string model_id, std::vector<std::size_t> dims)
    : model_id_(std::move(model_id)), dims_(std::move(dims)) {
  offsets_.push_back(0);
  for (auto d : dims_) offsets_.push_back(offsets_.back() + d);
}

KernelRep KernelRep::from_dense(const CMatrix& coeff, const EigenStructure& es) {
  const auto n = es.dimension();
  if (coeff.rows() != n || coeff.cols() != n)
    throw Error("KernelRep::from_dense: coefficient matrix does not match the basis size");
  KernelRep k(es.model().id(), es.multiplicities());
  for (std::size_t a = 0; a < es.level_cap(); ++a)
    for (std::size_t b = 0; b < es.level_cap(); ++b) {
      CMatrix blk(k.dims_[a], k.dims_[b]);
      bool nonzero = false;
      for (std::size_t i = 0; i < blk.rows(); ++i)
        for (std::size_t j = 0; j < blk.cols(); ++j) {
          blk(i, j) = coeff(k.offsets_[a] + i, k.offsets_[b] + j);
          nonzero = nonzero || blk(i, j) != Complex{};
        }
      if (nonzero) k.blocks_.emplace(LevelPair{a, b}, Block(std::move(blk)));
    }
  return k;
}

KernelRep KernelRep::from_symbol(const MatrixSymbol& sym) {
  KernelRep k(sym.model_id(), sym.dims());
  for (std::size_t l = 0; l < sym.level_count(); ++l) k.blocks_.emplace(LevelPair{l, l}, sym.block(l));
  return k;
}

KernelRep KernelRep::random(const EigenStructure& es, Lcg& rng) {
  KernelRep k(es.model().id(), es.multiplicities());
  for (std::size_t a = 0; a < es.level_cap(); ++a)
    for (std::size_t b = 0; b < es.level_cap(); ++b) {
      CMatrix blk(k.dims_[a], k.dims_[b]);
      for (auto& v : blk.data()) v = rng.complex();
      k.blocks_.emplace(LevelPair{a, b}, Block(std::move(blk)));
    }
  return k;
}

void KernelRep::set_block(std::size_t row_level, std::size_t col_level, Block b) {
  if (row_level >= dims_.size() || col_level >= dims_.size())
    throw Error("KernelRep::set_block: level out of range");
  if (b.rows() != dims_[row_level] || b.cols() != dims_[col_level])
    throw Error("KernelRep::set_block: block shape mismatch");
  blocks_.insert_or_assign(LevelPair{row_level, col_level}, std::move(b));
}

Complex KernelRep::coeff(std::size_t flat_row, std::size_t flat_col) const {
  const auto find_level = [&](std::size_t flat) {
    if (flat >= offsets_.back()) throw Error("KernelRep::coeff: index out of range");
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), flat);
    return static_cast<std::size_t>(std::distance(offsets_.begin(), it)) - 1;
  };
  const auto a = find_level(flat_row);
  const auto b = find_level(flat_col);
  const auto it = blocks_.find({a, b});
  if (it == blocks_.end()) return {};
  return it->second.entry(flat_row - offsets_[a], flat_col - offsets_[b]);
}

CMatrix KernelRep::to_dense() const {
  const auto n = offsets_.back();
  if (n > kMaxGlobalDimension)
    throw Error("kernel coefficient matrix of size " + std::to_string(n) +
                " exceeds the dense budget of " + std::to_string(kMaxGlobalDimension));
  CMatrix out(n, n);
  for (const auto& [lp, blk] : blocks_) {
    const auto ro = offsets_[lp.first];
    const auto co = offsets_[lp.second];
    blk.for_each_entry(
        [&](std::size_t i, std::size_t j, const Complex& v) { out(ro + i, co + j) = v; });
  }
  return out;
}

double KernelRep::frobenius_norm() const {
  double s = 0.0;
  for (const auto& [lp, blk] : blocks_) s += blk.frobenius_norm_squared();
  return std::sqrt(s);
}

Complex KernelRep::coefficient_trace() const {
  Complex t{};
  for (const auto& [lp, blk] : blocks_)
    if (lp.first == lp.second) t += blk.trace();
  return t;
}

void KernelRep::check_shape(const EigenStructure& es) const {
  if (model_id_ != es.model().id() || dims_ != es.multiplicities())
    throw Error("kernel does not match the eigenstructure");
}

std::vector<LevelTerm> mixed_sobolev_level_terms(const KernelRep& ker, const EigenStructure& es,
                                                 double mu1, double mu2) {
  ker.check_shape(es);
  if (mu1 < 0.0 || mu2 < 0.0) throw Error("mixed Sobolev orders must be nonnegative");
  const double nu = es.model().order;
  std::vector<double> per_level(es.level_cap(), 0.0);
  for (const auto& [lp, blk] : ker.blocks()) {
    const double wx = std::pow(1.0 + es.level(lp.first).lambda, 2.0 * mu1 / nu);
    const double wy = std::pow(1.0 + es.level(lp.second).lambda, 2.0 * mu2 / nu);
    per_level[std::max(lp.first, lp.second)] += wx * wy * blk.frobenius_norm_squared();
  }
  std::vector<LevelTerm> out;
  for (std::size_t l = 0; l < es.level_cap(); ++l) out.push_back({es.level(l).lambda, per_level[l]});
  return out;
}

double mixed_sobolev_norm(const KernelRep& ker, const EigenStructure& es, double mu1, double mu2) {
  double s = 0.0;
  for (const auto& t : mixed_sobolev_level_terms(ker, es, mu1, mu2)) s += t.term;
  return std::sqrt(s);
}

GlobalOperatorMatrix integral_operator(const KernelRep& ker, const EigenStructure& es) {
  ker.check_shape(es);
  return {ker.to_dense()};
}

Complex kernel_value(const KernelRep& ker, const EigenStructure& es, const Point& x,
                     const Point& y) {
  ker.check_shape(es);
  std::vector<Complex> ex(es.dimension()), ey(es.dimension());
  es.eval_all(x, ex);
  es.eval_all(y, ey);
  Complex v{};
  for (const auto& [lp, blk] : ker.blocks()) {
    const auto ro = es.offset(lp.first);
    const auto co = es.offset(lp.second);
    blk.for_each_entry([&](std::size_t i, std::size_t j, const Complex& c) {
      v += c * ex[ro + i] * std::conj(ey[co + j]);
    });
  }
  return v;
}

Complex diagonal_trace(const KernelRep& ker, const EigenStructure& es,
                       const QuadratureGrid& grid) {
  ker.check_shape(es);
  if (!es.has_evaluators())
    throw Error("diagonal_trace: model '" + es.model().id() + "' is spectral-only");
  const auto table = make_basis_table(es, grid);
  Complex total{};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto e = table.values.row(p);
    Complex kxx{};
    for (const auto& [lp, blk] : ker.blocks()) {
      const auto ro = es.offset(lp.first);
      const auto co = es.offset(lp.second);
      blk.for_each_entry([&](std::size_t i, std::size_t j, const Complex& c) {
        kxx += c * e[ro + i] * std::conj(e[co + j]);
      });
    }
    total += grid.weights[p] * kxx;
  }
  return total;
}

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

double kernel_schatten_threshold(int dimension, double mu1, double mu2) {
  const double n = dimension;
  return 2.0 * n / (n + 2.0 * (mu1 + mu2));
}

KernelSchattenReport kernel_schatten_experiment(const EigenStructure& es, double mu1, double mu2,
                                                double s, double r, double margin) {
  if (!(r > 0.0)) throw Error("kernel_schatten_experiment: r must be positive");
  KernelSchattenReport rep;
  rep.model_id = es.model().id();
  rep.mu1 = mu1;
  rep.mu2 = mu2;
  rep.s = s;
  rep.r = r;
  rep.predicted_threshold = kernel_schatten_threshold(es.model().dimension, mu1, mu2);

  const double nu = es.model().order;
  const auto sym = spectral_function_symbol(
      es, [&](double lam) { return std::pow(1.0 + lam, -s / nu); });
  const auto ker = KernelRep::from_symbol(sym);

  const auto kterms = mixed_sobolev_level_terms(ker, es, mu1, mu2);
  rep.kernel_verdict = classify_summability(kterms, margin);
  rep.mixed_norm = std::sqrt(rep.kernel_verdict.partial_sum);

  // Schatten terms from the singular values of the kernel blocks.
  std::vector<LevelTerm> sterms;
  for (const auto& [lp, blk] : ker.blocks())
    sterms.push_back({es.level(lp.first).lambda, singular_values(blk).power_sum(r)});
  rep.schatten_verdict = classify_summability(sterms, margin);
  rep.schatten_sum = rep.schatten_verdict.partial_sum;

  rep.hypothesis_met = rep.kernel_verdict.verdict == Verdict::Convergent;
  rep.r_in_range = r >= 1.1 * rep.predicted_threshold;

  if (rep.kernel_verdict.verdict == Verdict::Inconclusive) {
    rep.status = CheckStatus::Inconclusive;
    rep.note = "kernel membership undecided";
  } else if (!rep.hypothesis_met) {
    rep.status = CheckStatus::Pass;
    rep.note = "kernel outside H^{mu1,mu2}; criterion not applicable";
  } else if (!rep.r_in_range) {
    rep.status = CheckStatus::Pass;
    rep.note = "r below 1.1 r*; criterion not applicable";
  } else if (rep.schatten_verdict.verdict == Verdict::Divergent) {
    rep.status = CheckStatus::Fail;
    rep.note = "kernel in H^{mu1,mu2} but T_K classified outside S_r";
  } else if (rep.schatten_verdict.verdict == Verdict::Inconclusive) {
    rep.status = CheckStatus::Inconclusive;
    rep.note = "Schatten membership undecided";
  } else {
    rep.status = CheckStatus::Pass;
    rep.note = "kernel in H^{mu1,mu2} and T_K in S_r";
  }
  return rep;
}

}  // namespace ellspec
