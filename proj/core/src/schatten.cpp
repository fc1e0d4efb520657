#include "ellspec/schatten.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ellspec/jacobi.hpp"

namespace ellspec {

double SingularSpectrum::power_sum(double r) const {
  if (!(r > 0.0)) throw Error("Schatten exponent r must be positive");
  double s = 0.0;
  for (double v : values)
    if (v > 0.0) s += std::pow(v, r);
  return s;
}

double SingularSpectrum::quasi_norm(double r) const { return std::pow(power_sum(r), 1.0 / r); }

SingularSpectrum singular_values(const CMatrix& a) {
  if (!a.all_finite()) throw Error("singular_values: non-finite entries");
  const std::size_t k = std::min(a.rows(), a.cols());
  if (k == 0) return {};
  const auto eig = jacobi_eigh(a.adjoint() * a, /*want_vectors=*/false);
  double scale = 0.0;
  for (double v : eig.values) scale = std::max(scale, std::abs(v));
  SingularSpectrum out;
  out.values.reserve(eig.values.size());
  for (double v : eig.values) {
    if (v < -1e-12 * std::max(1.0, scale))
      throw Error("singular_values: Gram matrix lost positivity (eigenvalue " +
                  std::to_string(v) + ")");
    out.values.push_back(std::sqrt(std::max(0.0, v)));
  }
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  out.values.resize(k);
  return out;
}

SingularSpectrum singular_values(const Block& b) {
  if (!b.is_diagonal()) return singular_values(b.dense());
  SingularSpectrum out;
  for (const auto& v : b.diagonal()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error("singular_values: non-finite entries");
    out.values.push_back(std::abs(v));
  }
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

double schatten_blockwise(const MatrixSymbol& sym, double r) {
  double s = 0.0;
  for (const auto& b : sym.blocks()) s += singular_values(b).power_sum(r);
  return s;
}

double schatten_global(const GlobalOperatorMatrix& t, double r) {
  return singular_values(t.entries).power_sum(r);
}

Complex trace_from_symbol(const MatrixSymbol& sym) {
  Complex t{};
  for (const auto& b : sym.blocks()) t += b.trace();
  return t;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Convergent: return "convergent";
    case Verdict::Divergent: return "divergent";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

SummabilityVerdict classify_summability(std::span<const LevelTerm> terms, double margin) {
  if (!(margin > 0.0)) throw Error("classify_summability: margin must be positive");
  SummabilityVerdict out;
  bool all_zero = true;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    if (!(t.term >= 0.0) || !std::isfinite(t.term) || !std::isfinite(t.lambda))
      throw Error("classify_summability: terms must be finite and nonnegative");
    if (i > 0 && !(t.lambda > terms[i - 1].lambda))
      throw Error("classify_summability: lambda must be strictly increasing");
    out.partial_sum += t.term;
    all_zero = all_zero && t.term == 0.0;
  }
  if (terms.empty()) {
    out.diagnostics = "no terms";
    return out;
  }
  if (all_zero) {
    out.verdict = Verdict::Convergent;
    out.fitted_exponent = -std::numeric_limits<double>::infinity();
    out.diagnostics = "all terms vanish";
    return out;
  }

  const auto block_of = [](double lambda) {
    const double x = 1.0 + lambda;
    if (x < 2.0) return 0;
    int e = 0;
    std::frexp(x, &e);  // x = m 2^e, m in [0.5, 1)
    return e - 1;
  };
  const int complete = block_of(terms.back().lambda);
  out.complete_blocks = complete;
  out.block_sums.assign(static_cast<std::size_t>(std::max(complete, 0)), 0.0);
  for (const auto& t : terms) {
    const int k = block_of(t.lambda);
    if (k < complete) out.block_sums[static_cast<std::size_t>(k)] += t.term;
  }
  if (complete < 4) {
    std::ostringstream msg;
    msg << "only " << complete << " complete dyadic blocks (need 4)";
    out.diagnostics = msg.str();
    return out;
  }

  const int first = complete / 2;
  std::vector<double> ks, logs;
  for (int k = first; k < complete; ++k) {
    const double b = out.block_sums[static_cast<std::size_t>(k)];
    if (b > 0.0) {
      ks.push_back(k);
      logs.push_back(std::log2(b));
    }
  }
  out.blocks_used = static_cast<int>(ks.size());
  if (ks.size() < 2) {
    out.diagnostics = "fewer than two nonzero block sums in the fit window";
    return out;
  }
  const double n = static_cast<double>(ks.size());
  double mk = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    mk += ks[i];
    ml += logs[i];
  }
  mk /= n;
  ml /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    sxy += (ks[i] - mk) * (logs[i] - ml);
    sxx += (ks[i] - mk) * (ks[i] - mk);
  }
  out.fitted_exponent = sxy / sxx;

  bool never_decreasing = complete - first >= 3;
  for (int k = first + 1; k < complete && never_decreasing; ++k)
    never_decreasing = out.block_sums[static_cast<std::size_t>(k)] >=
                       out.block_sums[static_cast<std::size_t>(k - 1)];

  std::ostringstream msg;
  msg << "slope " << out.fitted_exponent << " over blocks " << first << ".." << complete - 1
      << ", margin " << margin;
  if (out.fitted_exponent > margin || never_decreasing) {
    out.verdict = Verdict::Divergent;
    if (never_decreasing && out.fitted_exponent <= margin) msg << "; block sums never decrease";
  } else if (out.fitted_exponent < -margin) {
    out.verdict = Verdict::Convergent;
  } else {
    out.verdict = Verdict::Inconclusive;
    msg << "; slope within margin";
  }
  out.diagnostics = msg.str();
  return out;
}

std::vector<LevelTerm> schatten_level_terms(const MatrixSymbol& sym, const EigenStructure& es,
                                            double r) {
  sym.check_shape(es);
  std::vector<LevelTerm> out;
  out.reserve(es.level_cap());
  for (std::size_t l = 0; l < es.level_cap(); ++l)
    out.push_back({es.level(l).lambda, singular_values(sym.block(l)).power_sum(r)});
  return out;
}

std::vector<LevelTerm> multiplicity_weighted_terms(const EigenStructure& es,
                                                   const std::function<double(double)>& g) {
  std::vector<LevelTerm> out;
  out.reserve(es.level_cap());
  for (const auto& lev : es.levels())
    out.push_back({lev.lambda, static_cast<double>(lev.multiplicity) * g(lev.lambda)});
  return out;
}

}  // namespace ellspec
