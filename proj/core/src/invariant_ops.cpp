#include "ellspec/invariant_ops.hpp"

#include <cmath>
#include <sstream>

#include "ellspec/rng.hpp"

namespace ellspec {

namespace {

void check_global(const GlobalOperatorMatrix& t, const EigenStructure& es) {
  const auto n = es.dimension();
  if (t.entries.rows() != n || t.entries.cols() != n)
    throw Error("global operator matrix is " + std::to_string(t.entries.rows()) + "x" +
                std::to_string(t.entries.cols()) + " but the flattened basis has size " +
                std::to_string(n));
}

}  // namespace

MatrixSymbol::MatrixSymbol(std::string model_id, std::vector<Block> blocks)
    : model_id_(std::move(model_id)), blocks_(std::move(blocks)) {
  for (const auto& b : blocks_)
    if (b.rows() != b.cols()) throw Error("symbol blocks must be square");
}

MatrixSymbol MatrixSymbol::identity(const EigenStructure& es) {
  std::vector<Block> blocks;
  for (const auto& lev : es.levels()) blocks.push_back(Block::scalar(lev.multiplicity, 1.0));
  return {es.model().id(), std::move(blocks)};
}

MatrixSymbol MatrixSymbol::zero(const EigenStructure& es) {
  std::vector<Block> blocks;
  for (const auto& lev : es.levels()) blocks.push_back(Block::scalar(lev.multiplicity, 0.0));
  return {es.model().id(), std::move(blocks)};
}

MatrixSymbol MatrixSymbol::random(const EigenStructure& es, Lcg& rng) {
  std::vector<Block> blocks;
  for (const auto& lev : es.levels()) {
    CMatrix m(lev.multiplicity, lev.multiplicity);
    for (auto& v : m.data()) v = rng.complex();
    blocks.emplace_back(std::move(m));
  }
  return {es.model().id(), std::move(blocks)};
}

MatrixSymbol MatrixSymbol::random_hermitian(const EigenStructure& es, Lcg& rng) {
  std::vector<Block> blocks;
  for (const auto& lev : es.levels()) {
    const auto d = lev.multiplicity;
    CMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      m(i, i) = rng.symmetric();
      for (std::size_t j = i + 1; j < d; ++j) {
        m(i, j) = rng.complex();
        m(j, i) = std::conj(m(i, j));
      }
    }
    blocks.emplace_back(std::move(m));
  }
  return {es.model().id(), std::move(blocks)};
}

std::vector<std::size_t> MatrixSymbol::dims() const {
  std::vector<std::size_t> d;
  for (const auto& b : blocks_) d.push_back(b.rows());
  return d;
}

void MatrixSymbol::check_shape(const EigenStructure& es) const {
  if (blocks_.size() != es.level_cap()) {
    std::ostringstream msg;
    msg << "symbol has " << blocks_.size() << " blocks but the eigenstructure retains "
        << es.level_cap() << " levels";
    throw Error(msg.str());
  }
  for (std::size_t l = 0; l < blocks_.size(); ++l)
    if (blocks_[l].rows() != es.level(l).multiplicity)
      throw Error("symbol block " + std::to_string(l) + " has size " +
                  std::to_string(blocks_[l].rows()) + ", expected " +
                  std::to_string(es.level(l).multiplicity));
}

FourierCoefficients quantize(const MatrixSymbol& sym, const FourierCoefficients& coeffs) {
  if (sym.level_count() != coeffs.level_count())
    throw Error("quantize: symbol and coefficients have different level counts");
  std::vector<std::vector<Complex>> out;
  out.reserve(sym.level_count());
  for (std::size_t l = 0; l < sym.level_count(); ++l) {
    const auto& in = coeffs.level(l);
    if (sym.block(l).cols() != in.size())
      throw Error("quantize: level " + std::to_string(l) + " shape mismatch");
    std::vector<Complex> y(sym.block(l).rows());
    sym.block(l).apply(in, y);
    out.push_back(std::move(y));
  }
  return {coeffs.model_id(), std::move(out)};
}

GlobalOperatorMatrix to_global(const MatrixSymbol& sym, const EigenStructure& es) {
  sym.check_shape(es);
  const auto n = es.dimension();
  if (n > kMaxGlobalDimension)
    throw Error("global matrix of size " + std::to_string(n) +
                " exceeds the dense budget of " + std::to_string(kMaxGlobalDimension));
  GlobalOperatorMatrix t{CMatrix(n, n)};
  for (std::size_t l = 0; l < sym.level_count(); ++l) {
    const auto off = es.offset(l);
    sym.block(l).for_each_entry([&](std::size_t i, std::size_t j, const Complex& v) {
      t.entries(off + i, off + j) = v;
    });
  }
  return t;
}

SymbolExtraction symbol_from_global(const GlobalOperatorMatrix& t, const EigenStructure& es) {
  check_global(t, es);
  std::vector<Block> blocks;
  blocks.reserve(es.level_cap());
  for (std::size_t l = 0; l < es.level_cap(); ++l) {
    const auto d = es.level(l).multiplicity;
    const auto off = es.offset(l);
    CMatrix b(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) b(i, j) = t.entries(off + i, off + j);
    blocks.emplace_back(std::move(b));
  }
  // Summed directly, not as ||T|| - ||blocks||, so block-diagonal input gives 0.
  double outside = 0.0;
  const auto n = es.dimension();
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = es.unflatten(i).first;
    const auto lo = es.offset(li);
    const auto hi = lo + es.level(li).multiplicity;
    for (std::size_t j = 0; j < n; ++j)
      if (j < lo || j >= hi) outside += std::norm(t.entries(i, j));
  }
  return {MatrixSymbol(es.model().id(), std::move(blocks)), std::sqrt(outside)};
}

double commutation_defect(const GlobalOperatorMatrix& t, const EigenStructure& es) {
  check_global(t, es);
  const auto lambda = es.flat_eigenvalues();
  // (TD - DT)_{ij} = T_ij (lambda_j - lambda_i)
  double s = 0.0;
  const auto n = es.dimension();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double gap = lambda[j] - lambda[i];
      if (gap != 0.0) s += std::norm(t.entries(i, j) * gap);
    }
  return std::sqrt(s);
}

MatrixSymbol spectral_function_symbol(const EigenStructure& es,
                                      const std::function<double(double)>& g) {
  std::vector<Block> blocks;
  for (std::size_t l = 0; l < es.level_cap(); ++l) {
    const double lam = es.level(l).lambda;
    const double v = g(lam);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "spectral_function_symbol: g is not finite at level " << l << " (lambda = " << lam
          << ")";
      throw Error(msg.str());
    }
    blocks.push_back(Block::scalar(es.level(l).multiplicity, v));
  }
  return {es.model().id(), std::move(blocks)};
}

MatrixSymbol compose(const MatrixSymbol& a, const MatrixSymbol& b) {
  if (a.level_count() != b.level_count() || a.model_id() != b.model_id())
    throw Error("compose: symbols belong to different eigenstructures");
  std::vector<Block> blocks;
  for (std::size_t l = 0; l < a.level_count(); ++l)
    blocks.push_back(a.block(l).compose(b.block(l)));
  return {a.model_id(), std::move(blocks)};
}

}  // namespace ellspec
