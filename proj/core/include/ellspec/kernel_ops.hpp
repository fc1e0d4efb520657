#pragma once

#include <map>
#include <string>
#include <utility>

#include "ellspec/block.hpp"
#include "ellspec/invariant_ops.hpp"
#include "ellspec/schatten.hpp"

namespace ellspec {

class Lcg;

/// Kernel K(x, y) = sum kappa_{(j,k),(j',k')} e_j^k(x) conj(e_{j'}^{k'}(y)),
/// stored as a block-sparse coefficient matrix over pairs of levels.
/// Missing blocks are zero.
///
/// By Parseval kappa is also the matrix of the integral operator T_K in the
/// eigenbasis, and ||K||_{L^2(M x M)} = ||kappa||_F.
class KernelRep {
 public:
  using LevelPair = std::pair<std::size_t, std::size_t>;

  KernelRep() = default;
  KernelRep(std::string model_id, std::vector<std::size_t> dims);

  static KernelRep from_dense(const CMatrix& coeff, const EigenStructure& es);
  /// Block-diagonal kernel of the invariant operator with this symbol.
  static KernelRep from_symbol(const MatrixSymbol& sym);
  /// Dense random coefficients over every retained pair of levels.
  static KernelRep random(const EigenStructure& es, Lcg& rng);

  const std::string& model_id() const noexcept { return model_id_; }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t level_count() const noexcept { return dims_.size(); }
  const std::map<LevelPair, Block>& blocks() const noexcept { return blocks_; }

  void set_block(std::size_t row_level, std::size_t col_level, Block b);
  Complex coeff(std::size_t flat_row, std::size_t flat_col) const;
  CMatrix to_dense() const;
  double frobenius_norm() const;
  /// sum of diagonal coefficients: the trace computed on the spectral side.
  Complex coefficient_trace() const;

  void check_shape(const EigenStructure& es) const;

 private:
  std::string model_id_;
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  std::map<LevelPair, Block> blocks_;
};

/// || (I+E)_x^{mu1/nu} (I+E)_y^{mu2/nu} K ||_{L^2(M x M)}.
double mixed_sobolev_norm(const KernelRep& ker, const EigenStructure& es, double mu1, double mu2);

/// Squared mixed-norm contributions aggregated by the larger of the two
/// levels of each block, for the summability classifier.
std::vector<LevelTerm> mixed_sobolev_level_terms(const KernelRep& ker, const EigenStructure& es,
                                                 double mu1, double mu2);

/// The integral operator T_K as a global matrix (kappa itself).
GlobalOperatorMatrix integral_operator(const KernelRep& ker, const EigenStructure& es);

/// K(x, y) from the basis expansion.
Complex kernel_value(const KernelRep& ker, const EigenStructure& es, const Point& x,
                     const Point& y);

/// Quadrature of K(x, x) over the grid.
Complex diagonal_trace(const KernelRep& ker, const EigenStructure& es,
                       const QuadratureGrid& grid);

enum class CheckStatus { Pass, Fail, Inconclusive };
std::string to_string(CheckStatus s);

/// Threshold r* = 2n / (n + 2(mu1 + mu2)) above which H^{mu1,mu2} kernels
/// give Schatten class S_r operators.
double kernel_schatten_threshold(int dimension, double mu1, double mu2);

struct KernelSchattenReport {
  std::string model_id;
  double mu1 = 0.0, mu2 = 0.0, s = 0.0, r = 0.0;
  double predicted_threshold = 0.0;
  double mixed_norm = 0.0;  // truncated
  SummabilityVerdict kernel_verdict;
  double schatten_sum = 0.0;  // truncated ||T_K||_{S_r}^r
  SummabilityVerdict schatten_verdict;
  /// Kernel classified as lying in H^{mu1,mu2}.
  bool hypothesis_met = false;
  /// r >= 1.1 r*, so a divergent Schatten verdict would contradict the criterion.
  bool r_in_range = false;
  CheckStatus status = CheckStatus::Inconclusive;
  std::string note;
};

/// Test family T_K = (I+E)^{-s/nu}: checks that whenever the kernel is
/// classified inside H^{mu1,mu2}, T_K is not classified outside S_r for
/// r >= 1.1 r*. Spectral models are supported (only symbols are used).
KernelSchattenReport kernel_schatten_experiment(const EigenStructure& es, double mu1, double mu2,
                                                double s, double r,
                                                double margin = kDefaultMargin);

}  // namespace ellspec
