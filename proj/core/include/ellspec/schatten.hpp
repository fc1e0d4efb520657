#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ellspec/block.hpp"
#include "ellspec/invariant_ops.hpp"

namespace ellspec {

/// Singular values in descending order.
struct SingularSpectrum {
  std::vector<double> values;

  /// sum_k s_k^r, i.e. ||A||_{S_r}^r.
  double power_sum(double r) const;
  /// (sum_k s_k^r)^{1/r}.
  double quasi_norm(double r) const;
};

/// Singular values via the Hermitian eigenproblem of A^* A.
SingularSpectrum singular_values(const CMatrix& a);
SingularSpectrum singular_values(const Block& b);

/// sum over levels of ||sigma(l)||_{S_r}^r.
double schatten_blockwise(const MatrixSymbol& sym, double r);
/// sum of s_k(T)^r for the full N x N matrix.
double schatten_global(const GlobalOperatorMatrix& t, double r);
/// sum over levels of Tr sigma(l).
Complex trace_from_symbol(const MatrixSymbol& sym);

// ---------------------------------------------------------------------------
// Summability classifier

enum class Verdict { Convergent, Divergent, Inconclusive };

std::string to_string(Verdict v);

struct LevelTerm {
  double lambda = 0.0;
  double term = 0.0;  // nonnegative, already aggregated over the level
};

struct SummabilityVerdict {
  Verdict verdict = Verdict::Inconclusive;
  /// Least-squares slope of log2(B_k) against k over the fitted window.
  double fitted_exponent = 0.0;
  int blocks_used = 0;
  int complete_blocks = 0;
  double partial_sum = 0.0;
  std::vector<double> block_sums;
  std::string diagnostics;
};

inline constexpr double kDefaultMargin = 0.15;

/// Classifies sum_l term_l from its dyadic block sums
///   B_k = sum { term_l : 2^k <= 1 + lambda_l < 2^{k+1} }.
///
/// The block holding the largest retained lambda may be cut by truncation
/// and is discarded; levels with 1 + lambda < 1 fall into block 0. The slope
/// of log2 B_k is fitted over the last half of the complete blocks:
/// slope < -margin is convergent; slope > margin, or block sums that never
/// decrease across the window, is divergent; anything else, or fewer than
/// four complete blocks, is inconclusive.
SummabilityVerdict classify_summability(std::span<const LevelTerm> terms,
                                        double margin = kDefaultMargin);

/// Per-level ||sigma(l)||_{S_r}^r paired with lambda_l.
std::vector<LevelTerm> schatten_level_terms(const MatrixSymbol& sym, const EigenStructure& es,
                                            double r);

/// Per-level d_l g(lambda_l): the terms of a scalar series over the spectrum.
std::vector<LevelTerm> multiplicity_weighted_terms(const EigenStructure& es,
                                                   const std::function<double(double)>& g);

}  // namespace ellspec
