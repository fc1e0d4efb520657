#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ellspec/block.hpp"
#include "ellspec/fourier.hpp"
#include "ellspec/spectral_models.hpp"

namespace ellspec {

class Lcg;

/// Matrix symbol of an operator invariant relative to E: one d_l x d_l block
/// per retained eigenvalue level.
class MatrixSymbol {
 public:
  MatrixSymbol() = default;
  MatrixSymbol(std::string model_id, std::vector<Block> blocks);

  static MatrixSymbol identity(const EigenStructure& es);
  static MatrixSymbol zero(const EigenStructure& es);
  /// Dense blocks with entries uniform in the unit square of C.
  static MatrixSymbol random(const EigenStructure& es, Lcg& rng);
  /// Dense Hermitian blocks.
  static MatrixSymbol random_hermitian(const EigenStructure& es, Lcg& rng);

  const std::string& model_id() const noexcept { return model_id_; }
  std::size_t level_count() const noexcept { return blocks_.size(); }
  const Block& block(std::size_t l) const { return blocks_.at(l); }
  Block& block(std::size_t l) { return blocks_.at(l); }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  std::vector<std::size_t> dims() const;

  void check_shape(const EigenStructure& es) const;

 private:
  std::string model_id_;
  std::vector<Block> blocks_;
};

/// The operator restricted to the truncated basis, as an N x N matrix in the
/// flattened level-major order of EigenStructure::flat_index. Column j holds
/// the coefficients of T e_j.
struct GlobalOperatorMatrix {
  CMatrix entries;
};

/// Largest N for which dense global matrices are formed.
inline constexpr std::size_t kMaxGlobalDimension = 4096;

/// Level-wise sigma(l) fhat(l).
FourierCoefficients quantize(const MatrixSymbol& sym, const FourierCoefficients& coeffs);

/// Block-diagonal embedding of a symbol.
GlobalOperatorMatrix to_global(const MatrixSymbol& sym, const EigenStructure& es);

struct SymbolExtraction {
  MatrixSymbol symbol;
  /// Frobenius norm of everything outside the diagonal blocks.
  double offdiag_defect = 0.0;
};

SymbolExtraction symbol_from_global(const GlobalOperatorMatrix& t, const EigenStructure& es);

/// || T D - D T ||_F with D the diagonal of eigenvalues in flattened order.
double commutation_defect(const GlobalOperatorMatrix& t, const EigenStructure& es);

/// sigma(l) = g(lambda_l) I, stored diagonally. Throws if g is not finite at
/// some retained eigenvalue.
MatrixSymbol spectral_function_symbol(const EigenStructure& es,
                                      const std::function<double(double)>& g);

/// Blockwise product sigma_1(l) sigma_2(l): the symbol of T_1 T_2.
MatrixSymbol compose(const MatrixSymbol& a, const MatrixSymbol& b);

}  // namespace ellspec
