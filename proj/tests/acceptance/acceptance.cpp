// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ellspec/experiments.hpp"
#include "ellspec/fourier.hpp"
#include "ellspec/invariant_ops.hpp"
#include "ellspec/kernel_ops.hpp"
#include "ellspec/nuclearity.hpp"
#include "ellspec/rng.hpp"
#include "ellspec/schatten.hpp"

using namespace ellspec;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

const std::vector<const char*> kGridModels = {"t1", "t2", "s2", "s3"};
const std::vector<const char*> kAllModels = {"t1", "t2", "s2", "s3", "su2-sub", "so3-h2"};

EigenStructure spectrum(const std::string& id, std::size_t levels) {
  return build_spectrum(ManifoldModel::parse(id), levels);
}

MatrixSymbol power_symbol(const EigenStructure& es, double exponent) {
  return spectral_function_symbol(es, [&](double l) { return std::pow(1.0 + l, exponent); });
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome ac1() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const char* id : {"t1", "s2", "s3"}) {
    const auto es = spectrum(id, 6);
    Lcg rng(1000);
    for (int t = 0; t < 50; ++t) {
      const auto sym = MatrixSymbol::random(es, rng);
      const auto global = to_global(sym, es);
      for (double r : {0.5, 1.0, 2.0}) {
        const double g = schatten_global(global, r);
        const double rel = std::abs(schatten_blockwise(sym, r) - g) / (1.0 + g);
        worst = std::max(worst, rel);
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(worst < 1e-10, "relative defect " + num(worst));
  o.require(secs < 60.0, "runtime " + num(secs) + " s");
  o.detail = o.pass ? "max relative defect " + num(worst) + ", " + num(secs) + " s" : o.detail;
  return o;
}

Outcome ac2() {
  Outcome o;
  double worst = 0.0;
  for (const char* id : kGridModels) {
    const auto es = spectrum(id, 5);
    const auto grid = quadrature_grid(es.model(), required_resolution(es));
    Lcg rng(2000);
    for (int t = 0; t < 20; ++t) {
      const auto sym = MatrixSymbol::random(es, rng);
      const auto spectral = trace_from_symbol(sym);
      const auto spatial = diagonal_trace(KernelRep::from_symbol(sym), es, grid);
      worst = std::max(worst, std::abs(spectral - spatial) / (1.0 + std::abs(spectral)));
      const auto ker = KernelRep::random(es, rng);
      const auto coeff = ker.coefficient_trace();
      worst = std::max(worst, std::abs(coeff - diagonal_trace(ker, es, grid)) / (1.0 + std::abs(coeff)));
    }
  }
  o.require(worst < 1e-8, "relative trace defect " + num(worst));
  if (o.pass) o.detail = "max relative trace defect " + num(worst);
  return o;
}

Outcome ac3() {
  Outcome o;
  const auto es = spectrum("s3", 60);
  for (double r : {1.0, 2.0}) {
    for (const auto& [ar, expected] : {std::pair{2.4, Verdict::Divergent}, std::pair{3.6, Verdict::Convergent}}) {
      const double alpha = ar / r;
      const auto sym = power_symbol(es, -alpha / 2.0);
      const auto v = classify_summability(schatten_level_terms(sym, es, r));
      o.require(v.verdict == expected, "alpha r = " + num(ar) + " at r = " + num(r) + " gave " +
                                           to_string(v.verdict));
      if (r == 2.0) {
        // ||K||_{L^2}^2 against the Hilbert-Schmidt sum at mu1 = mu2 = 0
        const auto ker = KernelRep::from_symbol(sym);
        const double l2 = mixed_sobolev_norm(ker, es, 0.0, 0.0);
        o.require(std::abs(l2 * l2 - v.partial_sum) < 1e-10 * (1.0 + v.partial_sum),
                  "L2 kernel norm differs from S_2 sum");
        const auto kv = classify_summability(mixed_sobolev_level_terms(ker, es, 0.0, 0.0));
        o.require(kv.verdict == expected, "kernel L2 verdict at alpha r = " + num(ar));
      }
    }
  }
  if (o.pass) o.detail = "level_cap 60, r in {1, 2}";
  return o;
}

Outcome threshold_pair(const EigenStructure& es, double threshold, std::size_t min_blocks) {
  Outcome o;
  for (double r : {1.0, 2.0}) {
    for (const auto& [ar, expected] : {std::pair{0.8 * threshold, Verdict::Divergent},
                                       std::pair{1.2 * threshold, Verdict::Convergent}}) {
      const auto sym = power_symbol(es, -(ar / r) / es.model().order);
      const auto v = classify_summability(schatten_level_terms(sym, es, r));
      o.require(v.verdict == expected, es.model().id() + " alpha r = " + num(ar) + " gave " +
                                           to_string(v.verdict));
      o.require(v.complete_blocks >= min_blocks,
                es.model().id() + " only " + std::to_string(v.complete_blocks) + " blocks");
    }
  }
  return o;
}

Outcome ac4() {
  const auto es = spectrum("su2-sub", 4000);
  auto o = threshold_pair(es, 4.0, 10);
  if (o.pass) o.detail = "alpha r in {3.2, 4.8}, max lambda " + num(es.max_lambda());
  return o;
}

Outcome ac5() {
  Outcome o;
  for (const char* id : {"so3-h1.5", "so3-h2", "so3-h4"}) {
    const auto sub = threshold_pair(spectrum(id, 6000), 4.0, 10);
    o.require(sub.pass, sub.detail);
  }
  if (o.pass) o.detail = "gamma in {1.5, 2, 4}, alpha p in {3.2, 4.8}";
  return o;
}

Outcome ac6() {
  Outcome o;
  int cases = 0, applicable_passes = 0;
  for (const auto& [id, levels] : {std::pair{"t1", std::size_t{3000}}, std::pair{"s2", std::size_t{600}}}) {
    const auto es = spectrum(id, levels);
    const double n = es.model().dimension;
    for (const auto& [mu1, mu2] : {std::pair{0.0, 0.0}, std::pair{1.0, 0.0}, std::pair{1.0, 1.0}}) {
      const double rstar = kernel_schatten_threshold(es.model().dimension, mu1, mu2);
      const double s_member = mu1 + mu2 + n / 2.0;
      int here = 0;
      for (double ds : {-0.6, -0.3, 0.3, 0.6, 1.0})
        for (double f : {1.1, 1.5, 2.0}) {
          const double s = s_member + ds, r = f * rstar;
          const auto rep = kernel_schatten_experiment(es, mu1, mu2, s, r);
          ++cases;
          o.require(!(rep.hypothesis_met && rep.schatten_verdict.verdict == Verdict::Divergent),
                    std::string(id) + " mu=(" + num(mu1) + "," + num(mu2) + ") s=" + num(s) +
                        " r=" + num(r) + ": in-space kernel with divergent Schatten verdict");
          o.require(rep.status != CheckStatus::Fail, std::string(id) + " s=" + num(s) + " r=" +
                                                         num(r) + ": " + rep.note);
          if (rep.hypothesis_met && rep.schatten_verdict.verdict == Verdict::Convergent) ++here;
          if (ds < 0.0)
            o.require(rep.kernel_verdict.verdict == Verdict::Divergent,
                      std::string(id) + " s=" + num(s) + " should lie outside the kernel space");
        }
      o.require(here > 0, std::string(id) + " mu=(" + num(mu1) + "," + num(mu2) +
                              ") has no applicable case");
      applicable_passes += here;
    }
  }
  if (o.pass)
    o.detail = std::to_string(cases) + " cases, " + std::to_string(applicable_passes) +
               " in-space kernels classified in S_r";
  return o;
}

Outcome ac7() {
  Outcome o;
  const auto es = spectrum("s3", 60);
  const auto probe = spectrum("s3", 12);
  const auto grid = quadrature_grid(probe.model(), required_resolution(probe, QuadratureRule::Lobatto),
                                    QuadratureRule::Lobatto);
  const auto ctl = lambda_control(probe, grid, ControlMode::HormanderFit);
  std::string thresholds;
  for (const auto& [r, p1, p2] : {std::tuple{1.0, 2.0, 2.0}, std::tuple{1.0, 2.0, 4.0},
                                  std::tuple{0.5, 2.0, 2.0}}) {
    const double t = s3_bessel_nuclearity_threshold(r, p1, p2);
    thresholds += (thresholds.empty() ? "" : ", ") + num(t);
    for (const auto& [alpha, expected] : {std::pair{0.8 * t, Verdict::Divergent},
                                          std::pair{1.2 * t, Verdict::Convergent}}) {
      const auto sum = nuclearity_sum_basis_free(power_symbol(es, -alpha / 2.0), es, r, p1, p2, ctl);
      o.require(sum.verdict.verdict == expected,
                "(r,p1,p2)=(" + num(r) + "," + num(p1) + "," + num(p2) + ") alpha=" + num(alpha) +
                    " gave " + to_string(sum.verdict.verdict));
    }
  }
  if (o.pass) o.detail = "thresholds " + thresholds;
  return o;
}

Outcome ac8() {
  Outcome o;
  int misclassified = 0;
  for (const char* id : kAllModels) {
    const auto es = spectrum(id, 4);
    Lcg rng(8000);
    for (int t = 0; t < 100; ++t) {
      const bool invariant = t % 2 == 0;
      auto g = to_global(MatrixSymbol::random(es, rng), es);
      if (!invariant)
        for (auto& v : g.entries.data()) v += 1e-6 * rng.complex();
      const bool a = symbol_from_global(g, es).offdiag_defect < 1e-10;
      const bool b = commutation_defect(g, es) < 1e-10;
      if (a != b || a != invariant) ++misclassified;
    }
  }
  o.require(misclassified == 0, std::to_string(misclassified) + " misclassifications");
  if (o.pass) o.detail = "600 matrices, 0 misclassifications";
  return o;
}

Outcome ac9() {
  Outcome o;
  double worst_defect = 0.0, worst_sup = 0.0;
  for (const char* id : kGridModels) {
    const auto es = spectrum(id, 8);
    const auto grid = quadrature_grid(es.model(), required_resolution(es));
    Lcg rng(9000);
    for (int t = 0; t < 10; ++t) {
      const auto f = inverse_transform(random_coefficients(es, rng), es, grid);
      worst_defect = std::max(worst_defect, plancherel_defect(f, es, grid));
      const auto g = inverse_transform(forward_transform(f, es, grid), es, grid);
      for (std::size_t i = 0; i < f.samples.size(); ++i)
        worst_sup = std::max(worst_sup, std::abs(f.samples[i] - g.samples[i]));
    }
  }
  o.require(worst_defect < 1e-10, "Plancherel defect " + num(worst_defect));
  o.require(worst_sup < 1e-10, "round-trip sup error " + num(worst_sup));
  if (o.pass) o.detail = "defect " + num(worst_defect) + ", sup error " + num(worst_sup);
  return o;
}

Outcome ac10() {
  Outcome o;
  std::string fitted;
  for (const auto& [id, n] : {std::pair{"s2", 2.0}, std::pair{"s3", 3.0}}) {
    const auto es = spectrum(id, 12);
    const auto grid = quadrature_grid(es.model(), required_resolution(es, QuadratureRule::Lobatto),
                                      QuadratureRule::Lobatto);
    const double e = sup_norm_growth_exponent(lambda_control(es, grid, ControlMode::Empirical));
    const double bound = (n - 1.0) / (2.0 * es.model().order);
    o.require(e <= bound + 0.1, std::string(id) + " exponent " + num(e) + " > " + num(bound + 0.1));
    fitted += std::string(fitted.empty() ? "" : ", ") + id + " " + num(e) + " (bound " + num(bound) + ")";
  }
  if (o.pass) o.detail = fitted;
  return o;
}

Outcome ac11() {
  Outcome o;
  double worst = 0.0;
  for (const char* id : kGridModels) {
    const auto es = spectrum(id, 4);
    const auto grid = quadrature_grid(es.model(), required_resolution(es));
    Lcg rng(11000);
    const auto sym = MatrixSymbol::random(es, rng);
    const auto dec = nuclear_decomposition(sym, es, grid, 1.0, 2.0, 2.0);
    for (int t = 0; t < 20; ++t) {
      const auto c = random_coefficients(es, rng);
      const auto f = inverse_transform(c, es, grid);
      const auto expected = inverse_transform(quantize(sym, c), es, grid);
      const auto got = dec.apply(f, grid);
      for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(got.samples[i] - expected.samples[i]));
    }
  }
  o.require(worst < 1e-8, "reconstruction error " + num(worst));
  if (o.pass) o.detail = "max reconstruction error " + num(worst);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1 Schatten characterization", ac1},  {"AC2 trace formulae", ac2},
      {"AC3 elliptic thresholds on s3", ac3}, {"AC4 sub-Laplacian threshold", ac4},
      {"AC5 Schroedinger threshold", ac5},    {"AC6 kernel criterion", ac6},
      {"AC7 nuclearity threshold", ac7},      {"AC8 invariance equivalences", ac8},
      {"AC9 Plancherel and inversion", ac9},  {"AC10 sup-norm growth", ac10},
      {"AC11 nuclear decomposition", ac11},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
