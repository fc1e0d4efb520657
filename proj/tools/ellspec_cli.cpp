#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ellspec/experiments.hpp"
#include "ellspec/fourier.hpp"
#include "ellspec/invariant_ops.hpp"
#include "ellspec/kernel_ops.hpp"
#include "ellspec/nuclearity.hpp"
#include "ellspec/rng.hpp"
#include "ellspec/schatten.hpp"
#include "ellspec/serialization.hpp"
#include "json.hpp"

namespace {

using namespace ellspec;
using ojson = nlohmann::ordered_json;

struct Globals {
  std::string model = "t1";
  std::size_t levels = 0;
  std::size_t resolution = 0;
  std::uint64_t seed = 42;
  unsigned jobs = 1;
  std::string out;
  std::string config;
};

ojson num(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

ojson verdict_json(const SummabilityVerdict& v) {
  ojson sums = ojson::array();
  for (double b : v.block_sums) sums.push_back(num(b));
  return {{"verdict", to_string(v.verdict)},
          {"partial_sum", num(v.partial_sum)},
          {"fitted_exponent", num(v.fitted_exponent)},
          {"complete_blocks", v.complete_blocks},
          {"block_sums", sums},
          {"diagnostics", v.diagnostics}};
}

// Writes to --out when given, otherwise stdout.
void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw Error("cannot write " + g.out);
  f << text;
}

std::size_t levels_or(const Globals& g, std::size_t fallback) {
  return g.levels != 0 ? g.levels : fallback;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw Error("empty value list");
  return out;
}

MatrixSymbol make_symbol(const std::string& spec, const EigenStructure& es, Lcg& rng) {
  if (spec == "identity") return MatrixSymbol::identity(es);
  if (spec == "random") return MatrixSymbol::random(es, rng);
  if (spec == "random-hermitian") return MatrixSymbol::random_hermitian(es, rng);
  if (spec.rfind("bessel:", 0) == 0) {
    const double alpha = std::stod(spec.substr(7));
    const double nu = es.model().order;
    return spectral_function_symbol(es,
                                    [&](double lam) { return std::pow(1.0 + lam, -alpha / nu); });
  }
  auto sym = load_symbol(spec);
  sym.check_shape(es);
  return sym;
}

int cmd_spectrum(const Globals& g) {
  const auto es = build_spectrum(ManifoldModel::parse(g.model), levels_or(g, 10));
  std::ostringstream out;
  out << "level_index,lambda,multiplicity\n";
  for (std::size_t l = 0; l < es.level_cap(); ++l)
    out << l << ',' << fmt(es.level(l).lambda) << ',' << es.level(l).multiplicity << '\n';
  emit(g, out.str());
  return 0;
}

int cmd_plancherel(const Globals& g) {
  const auto es = build_spectrum(ManifoldModel::parse(g.model), levels_or(g, 8));
  const auto res = g.resolution != 0 ? g.resolution : required_resolution(es);
  const auto grid = quadrature_grid(es.model(), res);
  Lcg rng(g.seed);
  const auto coeffs = random_coefficients(es, rng);
  const auto f = inverse_transform(coeffs, es, grid);
  const auto back = forward_transform(f, es, grid);
  const auto f2 = inverse_transform(back, es, grid);
  double sup_err = 0.0;
  for (std::size_t i = 0; i < f.samples.size(); ++i)
    sup_err = std::max(sup_err, std::abs(f.samples[i] - f2.samples[i]));
  ojson j = {{"model", es.model().id()},
             {"levels", es.level_cap()},
             {"dimension", es.dimension()},
             {"resolution", res},
             {"grid_points", grid.size()},
             {"seed", g.seed},
             {"plancherel_defect", plancherel_defect(f, es, grid)},
             {"sup_roundtrip_error", sup_err}};
  emit(g, j.dump(2) + "\n");
  return 0;
}

int cmd_schatten(const Globals& g, const std::string& symbol_spec, const std::string& r_text,
                 const std::string& save) {
  const auto es = build_spectrum(ManifoldModel::parse(g.model), levels_or(g, 6));
  Lcg rng(g.seed);
  const auto sym = make_symbol(symbol_spec, es, rng);
  if (!save.empty()) save_symbol(sym, save);
  const auto rs = parse_list(r_text);
  if (rs.size() > 1) {
    std::ostringstream out;
    out << "parameter,partial_sum,slope,verdict\n";
    for (double r : rs) {
      const auto v = classify_summability(schatten_level_terms(sym, es, r));
      out << fmt(r) << ',' << fmt(v.partial_sum) << ',' << fmt(v.fitted_exponent) << ','
          << to_string(v.verdict) << '\n';
    }
    emit(g, out.str());
    return 0;
  }
  const double r = rs.front();
  const double blockwise = schatten_blockwise(sym, r);
  ojson j = {{"model", es.model().id()},
             {"levels", es.level_cap()},
             {"dimension", es.dimension()},
             {"symbol", symbol_spec},
             {"r", r},
             {"blockwise", blockwise}};
  if (es.dimension() <= kMaxGlobalDimension) {
    const double global = schatten_global(to_global(sym, es), r);
    j["global"] = global;
    j["difference"] = std::abs(blockwise - global);
  } else {
    j["global"] = nullptr;
    j["note"] = "global dimension too large for the dense path";
  }
  j["series"] = verdict_json(classify_summability(schatten_level_terms(sym, es, r)));
  emit(g, j.dump(2) + "\n");
  return 0;
}

int cmd_kernel_sobolev(const Globals& g, double mu1, double mu2, double s, double r,
                       std::size_t grid_res, const std::string& save) {
  const auto model = ManifoldModel::parse(g.model);
  const auto es = build_spectrum(model, levels_or(g, model.kind == ModelKind::TorusCircle ? 3000 : 600));
  const auto rep = kernel_schatten_experiment(es, mu1, mu2, s, r);
  ojson j = {{"model", rep.model_id},
             {"levels", es.level_cap()},
             {"mu1", mu1},
             {"mu2", mu2},
             {"s", s},
             {"r", r},
             {"predicted_threshold", rep.predicted_threshold},
             {"mixed_norm", num(rep.mixed_norm)},
             {"kernel", verdict_json(rep.kernel_verdict)},
             {"schatten_sum", num(rep.schatten_sum)},
             {"schatten", verdict_json(rep.schatten_verdict)},
             {"hypothesis_met", rep.hypothesis_met},
             {"r_in_range", rep.r_in_range},
             {"status", to_string(rep.status)},
             {"note", rep.note}};
  const double nu = model.order;
  const auto family = [&](const EigenStructure& e) {
    return KernelRep::from_symbol(
        spectral_function_symbol(e, [&](double lam) { return std::pow(1.0 + lam, -s / nu); }));
  };
  if (!save.empty()) save_kernel(family(es), save);
  if (grid_res != 0) {
    // Trace cross-check on the levels the grid resolves exactly.
    const auto grid = quadrature_grid(model, grid_res);
    std::size_t cap = 0;
    while (cap < es.level_cap() && es.level(cap).lambda <= grid.max_exact_lambda) ++cap;
    if (cap == 0) throw Error("--grid too coarse for the first level");
    const auto small = build_spectrum(model, cap);
    const auto ker = family(small);
    const Complex ct = ker.coefficient_trace();
    const Complex qt = diagonal_trace(ker, small, grid);
    j["trace_check"] = {{"resolution", grid_res},
                        {"levels", cap},
                        {"coefficient_trace", ct.real()},
                        {"quadrature_trace", qt.real()},
                        {"difference", std::abs(ct - qt)}};
  }
  emit(g, j.dump(2) + "\n");
  return rep.status == CheckStatus::Fail ? 1 : 0;
}

int cmd_nuclearity(const Globals& g, double alpha, double r, double p1, double p2,
                   bool basis_free, std::size_t probe_levels) {
  const auto model = ManifoldModel::parse(g.model);
  const auto es = build_spectrum(model, levels_or(g, 60));
  const auto probe = build_spectrum(model, std::min(probe_levels, es.level_cap()));
  const auto res = g.resolution != 0 ? g.resolution
                                     : required_resolution(probe, QuadratureRule::Lobatto);
  const auto grid = quadrature_grid(model, res, QuadratureRule::Lobatto);
  const auto ctl = lambda_control(probe, grid, ControlMode::HormanderFit);
  const auto sym = spectral_function_symbol(
      es, [&](double lam) { return std::pow(1.0 + lam, -alpha / model.order); });
  const auto sum = basis_free ? nuclearity_sum_basis_free(sym, es, r, p1, p2, ctl)
                              : nuclearity_sum(sym, es, r, p1, p2, ctl);
  ojson j = {{"model", model.id()},
             {"levels", es.level_cap()},
             {"alpha", alpha},
             {"r", r},
             {"p1", p1},
             {"p2", p2},
             {"basis_free", basis_free},
             {"fitted_C", ctl.fitted_C},
             {"control_exponent", ctl.exponent},
             {"sum", num(sum.value)},
             {"series", verdict_json(sum.verdict)},
             {"sufficient_condition", sum.verdict.verdict == Verdict::Convergent  ? "holds"
                                      : sum.verdict.verdict == Verdict::Divergent ? "fails"
                                                                                  : "undecided"}};
  if (model.kind == ModelKind::Sphere3Laplacian)
    j["predicted_threshold"] = s3_bessel_nuclearity_threshold(r, p1, p2);
  else
    j["predicted_threshold"] = nullptr;
  emit(g, j.dump(2) + "\n");
  return 0;
}

ExperimentConfig load_config(const Globals& g, const std::vector<std::string>& sets) {
  std::string text;
  if (!g.config.empty()) {
    std::ifstream in(g.config);
    if (!in) throw Error("cannot open config " + g.config);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  // --set entries override file entries with the same key.
  std::ostringstream merged;
  std::istringstream lines(text);
  std::string line;
  const auto key_of = [](const std::string& l) {
    const auto eq = l.find('=');
    std::string k = eq == std::string::npos ? l : l.substr(0, eq);
    k.erase(0, k.find_first_not_of(" \t"));
    k.erase(k.find_last_not_of(" \t") + 1);
    return k;
  };
  std::vector<std::string> overridden;
  for (const auto& s : sets) overridden.push_back(key_of(s));
  while (std::getline(lines, line))
    if (std::find(overridden.begin(), overridden.end(), key_of(line)) == overridden.end())
      merged << line << '\n';
  for (const auto& s : sets) merged << s << '\n';
  auto cfg = ExperimentConfig::parse(merged.str());
  if (g.levels != 0) cfg.levels = g.levels;
  if (g.resolution != 0) cfg.resolution = g.resolution;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier analysis relative to an elliptic operator on model manifolds"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  auto* model_opt =
      app.add_option("--model", g.model, "Model id: t1, t2, s2, s3, su2-sub, so3-h<gamma>");
  app.add_option("--levels", g.levels, "Number of retained eigenvalue levels");
  app.add_option("--resolution", g.resolution, "Quadrature resolution");
  auto* seed_opt = app.add_option("--seed", g.seed, "LCG seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Concurrent sweep cases")->capture_default_str();
  app.add_option("--out", g.out, "Output path (prefix for run and sweep)");
  app.add_option("--config", g.config, "key = value experiment config");

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalue levels as CSV");

  auto* plancherel = app.add_subcommand("plancherel", "Plancherel defect of a random band-limited function");

  std::string symbol_spec = "random", r_text = "1", save_symbol_path;
  auto* schatten = app.add_subcommand("schatten", "Blockwise and global Schatten quasi-norms");
  schatten->add_option("--symbol", symbol_spec,
                       "Symbol file or builtin: identity, random, random-hermitian, bessel:<alpha>")
      ->capture_default_str();
  schatten->add_option("--r", r_text, "Exponent; a comma-separated list gives a CSV sweep")
      ->capture_default_str();
  schatten->add_option("--save-symbol", save_symbol_path, "Write the symbol (.json or binary)");

  double mu1 = 0.0, mu2 = 0.0, s = 1.0, r_kernel = 2.0;
  std::size_t grid_res = 0;
  std::string save_kernel_path;
  auto* kernel = app.add_subcommand("kernel-sobolev", "Mixed Sobolev kernel criterion report");
  kernel->add_option("--mu1", mu1)->capture_default_str();
  kernel->add_option("--mu2", mu2)->capture_default_str();
  kernel->add_option("--s", s, "Decay exponent of the test family (1+lambda)^{-s/nu}")
      ->capture_default_str();
  kernel->add_option("--r", r_kernel)->capture_default_str();
  kernel->add_option("--grid", grid_res, "Resolution for a quadrature trace cross-check");
  kernel->add_option("--save-kernel", save_kernel_path, "Write the kernel (.json or binary)");

  double alpha = 4.0, r_nuc = 1.0, p1 = 2.0, p2 = 2.0;
  bool basis_free = false;
  std::size_t probe_levels = 12;
  auto* nuclearity = app.add_subcommand("nuclearity", "r-nuclearity sufficient-condition sum");
  nuclearity->add_option("--alpha", alpha)->capture_default_str();
  nuclearity->add_option("--r", r_nuc)->capture_default_str();
  nuclearity->add_option("--p1", p1)->capture_default_str();
  nuclearity->add_option("--p2", p2)->capture_default_str();
  nuclearity->add_flag("--basis-free", basis_free, "Use the basis-free sum (Hermitian blocks)");
  nuclearity->add_option("--probe-levels", probe_levels, "Levels probed for the sup-norm fit")
      ->capture_default_str();

  std::vector<std::string> sets;
  auto* run = app.add_subcommand("run", "Run a configured experiment");
  run->add_option("--set", sets, "Extra key=value entries overriding the config file");

  std::string param, values_text;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter of a configured experiment");
  sweep_cmd->add_option("--param", param, "Parameter name")->required();
  sweep_cmd->add_option("--values", values_text, "Comma-separated values")->required();
  sweep_cmd->add_option("--set", sets, "Extra key=value entries overriding the config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*spectrum) return cmd_spectrum(g);
    if (*plancherel) return cmd_plancherel(g);
    if (*schatten) return cmd_schatten(g, symbol_spec, r_text, save_symbol_path);
    if (*kernel) return cmd_kernel_sobolev(g, mu1, mu2, s, r_kernel, grid_res, save_kernel_path);
    if (*nuclearity) return cmd_nuclearity(g, alpha, r_nuc, p1, p2, basis_free, probe_levels);
    if (*run) {
      auto cfg = load_config(g, sets);
      if (model_opt->count() > 0) cfg.model = g.model;
      if (seed_opt->count() > 0) cfg.seed = g.seed;
      if (!g.out.empty()) cfg.output = g.out;
      const auto report = run_experiment(cfg);
      std::cout << report.to_json() << '\n';
      return report.status == CheckStatus::Fail ? 1 : 0;
    }
    if (*sweep_cmd) {
      auto cfg = load_config(g, sets);
      if (model_opt->count() > 0) cfg.model = g.model;
      if (seed_opt->count() > 0) cfg.seed = g.seed;
      const auto values = parse_list(values_text);
      const auto reports = ellspec::sweep(cfg, param, values, g.jobs);
      const auto csv = sweep_csv(reports, values);
      if (g.out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream(g.out + ".csv") << csv;
        std::ofstream js(g.out + ".json");
        js << "[\n";
        for (std::size_t i = 0; i < reports.size(); ++i)
          js << reports[i].to_json() << (i + 1 < reports.size() ? ",\n" : "\n");
        js << "]\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
