#include "ellspec/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "ellspec/fourier.hpp"
#include "ellspec/invariant_ops.hpp"
#include "ellspec/nuclearity.hpp"
#include "ellspec/rng.hpp"
#include "json.hpp"

namespace ellspec {

namespace {

using ojson = nlohmann::ordered_json;

struct ExperimentSpec {
  std::vector<std::string> required;
  std::vector<std::string> optional;
  std::set<std::string> list_valued;
  bool needs_model = true;
};

const std::map<std::string, ExperimentSpec>& experiment_table() {
  static const std::map<std::string, ExperimentSpec> table = {
      {"plancherel", {{}, {"trials", "tol"}, {}, true}},
      {"invariance", {{}, {"trials", "perturbation"}, {}, true}},
      {"schatten-identity", {{}, {"r", "trials", "tol"}, {"r"}, true}},
      {"trace-formula", {{}, {"trials", "tol"}, {}, true}},
      {"kernel-sobolev", {{"mu1", "mu2", "s", "r"}, {"margin"}, {"s", "r"}, true}},
      {"subelliptic-threshold", {{"alpha"}, {"r", "threshold", "margin"}, {"alpha", "r"}, false}},
      {"schrodinger-threshold",
       {{"alpha"}, {"gamma", "r", "threshold", "margin", "shift"}, {"alpha", "r", "gamma"}, false}},
      {"nuclearity-threshold",
       {{"alpha"},
        {"r", "p1", "p2", "threshold", "margin", "probe_levels", "basis_free"},
        {"alpha"},
        false}},
  };
  return table;
}

const std::set<std::string>& known_numeric_keys() {
  static const std::set<std::string> keys = {
      "alpha", "r",   "s",     "mu1",  "mu2",    "gamma",        "p1",        "p2",
      "trials", "tol", "perturbation", "threshold", "margin", "probe_levels", "basis_free", "shift"};
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& text, const std::string& where) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw Error(where + ": '" + text + "' is not a number");
  return v;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& where) {
  std::uint64_t v = 0;
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (ec != std::errc() || ptr != last)
    throw Error(where + ": '" + text + "' is not a non-negative integer");
  return v;
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

ojson number_json(double v) {
  if (std::isfinite(v)) return v;
  return fmt_double(v);
}

CheckStatus grade(Verdict got, Verdict expected) {
  if (got == expected) return CheckStatus::Pass;
  if (got == Verdict::Inconclusive) return CheckStatus::Inconclusive;
  return CheckStatus::Fail;
}

void attach_series(CaseResult& c, const SummabilityVerdict& v) {
  c.has_series = true;
  c.partial_sum = v.partial_sum;
  c.fitted_exponent = v.fitted_exponent;
  c.verdict = v.verdict;
  c.block_sums = v.block_sums;
  c.values.emplace_back("complete_blocks", v.complete_blocks);
  c.labels.emplace_back("verdict", to_string(v.verdict));
  if (!v.diagnostics.empty()) c.labels.emplace_back("diagnostics", v.diagnostics);
}

std::size_t default_levels(const std::string& experiment, const ManifoldModel& model) {
  if (experiment == "plancherel") return 8;
  if (experiment == "invariance" || experiment == "trace-formula") return 4;
  if (experiment == "schatten-identity") return 6;
  switch (model.kind) {
    case ModelKind::TorusCircle: return 3000;
    case ModelKind::Torus2: return 400;
    case ModelKind::Sphere2: return 600;
    case ModelKind::Sphere3Laplacian: return 60;
    case ModelKind::SU2SubLaplacian: return 4000;
    case ModelKind::SO3Schrodinger: return 6000;
  }
  return 60;
}

// Homogeneous dimension governing the Schatten threshold of (I+E)^{-alpha/nu}.
double default_threshold(const ManifoldModel& model) {
  switch (model.kind) {
    case ModelKind::SU2SubLaplacian:
    case ModelKind::SO3Schrodinger:
      return 4.0;
    default:
      return model.dimension;
  }
}

std::string default_model(const std::string& experiment) {
  if (experiment == "subelliptic-threshold") return "su2-sub";
  if (experiment == "schrodinger-threshold") return "so3-h2";
  if (experiment == "nuclearity-threshold") return "s3";
  return {};
}

ManifoldModel resolve_model(const ExperimentConfig& cfg) {
  return ManifoldModel::parse(cfg.model.empty() ? default_model(cfg.experiment) : cfg.model);
}

std::size_t resolve_levels(const ExperimentConfig& cfg, const ManifoldModel& model) {
  return cfg.levels != 0 ? cfg.levels : default_levels(cfg.experiment, model);
}

QuadratureGrid resolve_grid(const ExperimentConfig& cfg, const EigenStructure& es,
                            QuadratureRule rule = QuadratureRule::Gauss) {
  const auto res = cfg.resolution != 0 ? cfg.resolution : required_resolution(es, rule);
  return quadrature_grid(es.model(), res, rule);
}

std::size_t trials(const ExperimentConfig& cfg, double fallback) {
  return static_cast<std::size_t>(cfg.number_or("trials", fallback));
}

// Runs fn into a fresh case, recording thrown errors on the case.
template <typename Fn>
CaseResult guarded(std::string name, double value, Fn&& fn) {
  CaseResult c;
  c.name = std::move(name);
  c.value = value;
  try {
    fn(c);
  } catch (const std::exception& e) {
    c.status = CheckStatus::Fail;
    c.error = e.what();
  }
  return c;
}

// ---------------------------------------------------------------------------
// Experiments

std::vector<CaseResult> run_plancherel(const ExperimentConfig& cfg) {
  const auto model = resolve_model(cfg);
  const auto es = build_spectrum(model, resolve_levels(cfg, model));
  const auto grid = resolve_grid(cfg, es);
  const auto table = make_basis_table(es, grid);
  const double tol = cfg.number_or("tol", 1e-10);
  Lcg rng(cfg.seed);
  std::vector<CaseResult> cases;
  for (std::size_t t = 0; t < trials(cfg, 5); ++t) {
    const auto coeffs = random_coefficients(es, rng);
    cases.push_back(guarded("trial " + std::to_string(t), static_cast<double>(t), [&](CaseResult& c) {
      const auto f = inverse_transform(coeffs, es, grid, table);
      const auto back = forward_transform(f, es, grid, table);
      const auto f2 = inverse_transform(back, es, grid, table);
      double coeff_err = 0.0, sup_err = 0.0;
      const auto a = coeffs.flatten(), b = back.flatten();
      for (std::size_t i = 0; i < a.size(); ++i) coeff_err = std::max(coeff_err, std::abs(a[i] - b[i]));
      for (std::size_t i = 0; i < f.samples.size(); ++i)
        sup_err = std::max(sup_err, std::abs(f.samples[i] - f2.samples[i]));
      const double defect = std::abs(grid_norm2(f, grid) - back.squared_norm());
      c.values = {{"plancherel_defect", defect},
                  {"coefficient_roundtrip_error", coeff_err},
                  {"sup_roundtrip_error", sup_err},
                  {"grid_points", static_cast<double>(grid.size())}};
      c.partial_sum = defect;
      c.status = defect < tol && coeff_err < tol && sup_err < tol ? CheckStatus::Pass
                                                                  : CheckStatus::Fail;
    }));
  }
  return cases;
}

std::vector<CaseResult> run_invariance(const ExperimentConfig& cfg) {
  const auto model = resolve_model(cfg);
  const auto es = build_spectrum(model, resolve_levels(cfg, model));
  if (es.dimension() > kMaxGlobalDimension)
    throw Error("invariance: global dimension " + std::to_string(es.dimension()) + " too large");
  const double eps = cfg.number_or("perturbation", 1e-6);
  Lcg rng(cfg.seed);
  std::vector<CaseResult> cases;
  for (std::size_t t = 0; t < trials(cfg, 100); ++t) {
    const bool invariant = t % 2 == 0;
    auto global = to_global(MatrixSymbol::random(es, rng), es);
    if (!invariant)
      for (auto& v : global.entries.data()) v += eps * rng.complex();
    cases.push_back(guarded(invariant ? "block-diagonal" : "perturbed", static_cast<double>(t),
                            [&](CaseResult& c) {
                              const auto ex = symbol_from_global(global, es);
                              const double comm = commutation_defect(global, es);
                              const bool by_offdiag = ex.offdiag_defect < 1e-10;
                              const bool by_comm = comm < 1e-10;
                              c.values = {{"offdiag_defect", ex.offdiag_defect},
                                          {"commutation_defect", comm}};
                              c.labels = {{"truth", invariant ? "invariant" : "not invariant"}};
                              c.partial_sum = ex.offdiag_defect;
                              c.status = by_offdiag == by_comm && by_offdiag == invariant
                                             ? CheckStatus::Pass
                                             : CheckStatus::Fail;
                            }));
  }
  return cases;
}

std::vector<CaseResult> run_schatten_identity(const ExperimentConfig& cfg) {
  const auto model = resolve_model(cfg);
  const auto es = build_spectrum(model, resolve_levels(cfg, model));
  if (es.dimension() > kMaxGlobalDimension)
    throw Error("schatten-identity: global dimension " + std::to_string(es.dimension()) +
                " too large");
  const auto rs = cfg.list_or("r", {1.0});
  const double tol = cfg.number_or("tol", 1e-10);
  Lcg rng(cfg.seed);
  std::vector<CaseResult> cases;
  for (std::size_t t = 0; t < trials(cfg, 10); ++t) {
    const auto sym = MatrixSymbol::random(es, rng);
    const auto global = to_global(sym, es);
    for (double r : rs) {
      cases.push_back(guarded("trial " + std::to_string(t) + " r=" + fmt_double(r), r,
                              [&](CaseResult& c) {
                                const double b = schatten_blockwise(sym, r);
                                const double g = schatten_global(global, r);
                                const double defect = std::abs(b - g);
                                c.values = {{"r", r},
                                            {"blockwise", b},
                                            {"global", g},
                                            {"defect", defect}};
                                c.partial_sum = b;
                                c.status = defect < tol * (1.0 + g) ? CheckStatus::Pass
                                                                    : CheckStatus::Fail;
                              }));
    }
  }
  return cases;
}

std::vector<CaseResult> run_trace_formula(const ExperimentConfig& cfg) {
  const auto model = resolve_model(cfg);
  const auto es = build_spectrum(model, resolve_levels(cfg, model));
  const auto grid = resolve_grid(cfg, es);
  const double tol = cfg.number_or("tol", 1e-8);
  Lcg rng(cfg.seed);
  std::vector<CaseResult> cases;
  for (std::size_t t = 0; t < trials(cfg, 20); ++t) {
    const auto sym = MatrixSymbol::random(es, rng);
    const auto general = KernelRep::random(es, rng);
    cases.push_back(guarded("trial " + std::to_string(t), static_cast<double>(t), [&](CaseResult& c) {
      const Complex spectral = trace_from_symbol(sym);
      const Complex spatial = diagonal_trace(KernelRep::from_symbol(sym), es, grid);
      const Complex coeff = general.coefficient_trace();
      const Complex diag = diagonal_trace(general, es, grid);
      const double d1 = std::abs(spectral - spatial);
      const double d2 = std::abs(coeff - diag);
      c.values = {{"symbol_trace_re", spectral.real()},
                  {"symbol_trace_im", spectral.imag()},
                  {"invariant_defect", d1},
                  {"kernel_trace_re", coeff.real()},
                  {"kernel_trace_im", coeff.imag()},
                  {"kernel_defect", d2}};
      c.partial_sum = std::abs(spectral);
      c.status = d1 < tol * (1.0 + std::abs(spectral)) && d2 < tol * (1.0 + std::abs(coeff))
                     ? CheckStatus::Pass
                     : CheckStatus::Fail;
    }));
  }
  return cases;
}

std::vector<CaseResult> run_kernel_sobolev(const ExperimentConfig& cfg) {
  const auto model = resolve_model(cfg);
  const auto es = build_spectrum(model, resolve_levels(cfg, model));
  const double mu1 = cfg.number("mu1"), mu2 = cfg.number("mu2");
  const double margin = cfg.number_or("margin", kDefaultMargin);
  std::vector<CaseResult> cases;
  for (double s : cfg.list("s"))
    for (double r : cfg.list("r")) {
      cases.push_back(guarded("s=" + fmt_double(s) + " r=" + fmt_double(r), s, [&](CaseResult& c) {
        const auto rep = kernel_schatten_experiment(es, mu1, mu2, s, r, margin);
        attach_series(c, rep.kernel_verdict);
        c.partial_sum = rep.mixed_norm;
        c.values.insert(c.values.begin(), {{"s", s},
                                           {"r", r},
                                           {"predicted_threshold", rep.predicted_threshold},
                                           {"mixed_norm", rep.mixed_norm},
                                           {"schatten_sum", rep.schatten_sum},
                                           {"schatten_exponent", rep.schatten_verdict.fitted_exponent}});
        c.labels.emplace_back("kernel_verdict", to_string(rep.kernel_verdict.verdict));
        c.labels.emplace_back("schatten_verdict", to_string(rep.schatten_verdict.verdict));
        c.labels.emplace_back("hypothesis_met", rep.hypothesis_met ? "true" : "false");
        c.labels.emplace_back("r_in_range", rep.r_in_range ? "true" : "false");
        c.labels.emplace_back("note", rep.note);
        c.status = rep.status;
      }));
    }
  return cases;
}

// Schatten series of (I+E)^{-alpha/nu}: expected convergent iff alpha r > threshold.
CaseResult threshold_case(const EigenStructure& es, double alpha, double r, double threshold,
                          double margin, const std::string& prefix) {
  return guarded(prefix + "alpha=" + fmt_double(alpha) + " r=" + fmt_double(r), alpha,
                 [&](CaseResult& c) {
                   const double nu = es.model().order;
                   const auto sym = spectral_function_symbol(
                       es, [&](double lam) { return std::pow(1.0 + lam, -alpha / nu); });
                   const auto terms = schatten_level_terms(sym, es, r);
                   const auto v = classify_summability(terms, margin);
                   attach_series(c, v);
                   c.values.insert(c.values.begin(), {{"alpha", alpha},
                                                      {"r", r},
                                                      {"alpha_r", alpha * r},
                                                      {"threshold", threshold},
                                                      {"max_lambda", es.max_lambda()}});
                   const Verdict expected =
                       alpha * r > threshold ? Verdict::Convergent : Verdict::Divergent;
                   c.labels.emplace_back("expected", to_string(expected));
                   c.status = grade(v.verdict, expected);
                 });
}

std::vector<CaseResult> run_subelliptic(const ExperimentConfig& cfg) {
  const auto model = resolve_model(cfg);
  const auto es = build_spectrum(model, resolve_levels(cfg, model));
  const double threshold = cfg.number_or("threshold", default_threshold(model));
  const double margin = cfg.number_or("margin", kDefaultMargin);
  std::vector<CaseResult> cases;
  for (double r : cfg.list_or("r", {1.0}))
    for (double alpha : cfg.list("alpha"))
      cases.push_back(threshold_case(es, alpha, r, threshold, margin, ""));
  return cases;
}

std::vector<CaseResult> run_schrodinger(const ExperimentConfig& cfg) {
  std::vector<ManifoldModel> models;
  if (cfg.has("gamma")) {
    for (double g : cfg.list("gamma"))
      models.push_back(
          ManifoldModel::make(ModelKind::SO3Schrodinger, g, cfg.number_or("shift", 0.0)));
  } else {
    models.push_back(resolve_model(cfg));
  }
  const double margin = cfg.number_or("margin", kDefaultMargin);
  std::vector<CaseResult> cases;
  for (const auto& model : models) {
    const auto es = build_spectrum(model, resolve_levels(cfg, model));
    const double threshold = cfg.number_or("threshold", default_threshold(model));
    for (double r : cfg.list_or("r", {1.0}))
      for (double alpha : cfg.list("alpha"))
        cases.push_back(threshold_case(es, alpha, r, threshold, margin, model.id() + " "));
  }
  return cases;
}

std::vector<CaseResult> run_nuclearity(const ExperimentConfig& cfg) {
  const auto model = resolve_model(cfg);
  const auto es = build_spectrum(model, resolve_levels(cfg, model));
  const double r = cfg.number_or("r", 1.0);
  const double p1 = cfg.number_or("p1", 2.0);
  const double p2 = cfg.number_or("p2", 2.0);
  const double margin = cfg.number_or("margin", kDefaultMargin);
  const bool basis_free = cfg.number_or("basis_free", 0.0) != 0.0;
  const auto probe_levels = std::min<std::size_t>(
      es.level_cap(), static_cast<std::size_t>(cfg.number_or("probe_levels", 12)));
  std::optional<double> threshold;
  if (cfg.has("threshold"))
    threshold = cfg.number("threshold");
  else if (model.kind == ModelKind::Sphere3Laplacian)
    threshold = s3_bessel_nuclearity_threshold(r, p1, p2);

  const auto probe = build_spectrum(model, probe_levels);
  const auto grid = resolve_grid(cfg, probe, QuadratureRule::Lobatto);
  const auto ctl = lambda_control(probe, grid, ControlMode::HormanderFit);

  std::vector<CaseResult> cases;
  for (double alpha : cfg.list("alpha")) {
    cases.push_back(guarded("alpha=" + fmt_double(alpha), alpha, [&](CaseResult& c) {
      const double nu = model.order;
      const auto sym = spectral_function_symbol(
          es, [&](double lam) { return std::pow(1.0 + lam, -alpha / nu); });
      const auto sum = basis_free ? nuclearity_sum_basis_free(sym, es, r, p1, p2, ctl, margin)
                                  : nuclearity_sum(sym, es, r, p1, p2, ctl, margin);
      attach_series(c, sum.verdict);
      c.values.insert(c.values.begin(), {{"alpha", alpha},
                                         {"r", r},
                                         {"p1", p1},
                                         {"p2", p2},
                                         {"fitted_C", ctl.fitted_C},
                                         {"sum", sum.value}});
      c.labels.emplace_back("sufficient_condition",
                            sum.verdict.verdict == Verdict::Convergent ? "holds"
                            : sum.verdict.verdict == Verdict::Divergent ? "fails"
                                                                        : "undecided");
      if (threshold) {
        c.values.emplace_back("predicted_threshold", *threshold);
        const Verdict expected = alpha > *threshold ? Verdict::Convergent : Verdict::Divergent;
        c.labels.emplace_back("expected", to_string(expected));
        c.status = grade(sum.verdict.verdict, expected);
      } else {
        c.status = sum.verdict.verdict == Verdict::Convergent ? CheckStatus::Pass
                                                               : CheckStatus::Inconclusive;
      }
    }));
  }
  return cases;
}

CheckStatus overall(const std::vector<CaseResult>& cases) {
  if (cases.empty()) return CheckStatus::Inconclusive;
  bool all_pass = true;
  for (const auto& c : cases) {
    if (c.status == CheckStatus::Fail) return CheckStatus::Fail;
    all_pass = all_pass && c.status == CheckStatus::Pass;
  }
  return all_pass ? CheckStatus::Pass : CheckStatus::Inconclusive;
}

ojson config_json(const ExperimentConfig& cfg) {
  ojson j;
  j["experiment"] = cfg.experiment;
  j["model"] = cfg.model.empty() ? default_model(cfg.experiment) : cfg.model;
  j["levels"] = cfg.levels;
  j["resolution"] = cfg.resolution;
  j["seed"] = cfg.seed;
  j["output"] = cfg.output;
  ojson params = ojson::object();
  for (const auto& [k, vs] : cfg.params) {
    ojson arr = ojson::array();
    for (double v : vs) arr.push_back(number_json(v));
    params[k] = arr;
  }
  j["params"] = params;
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// ExperimentConfig

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::set<std::string> seen;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    const std::string where = "config line " + std::to_string(lineno);
    if (eq == std::string::npos) throw Error(where + ": expected key = value");
    const auto key = trim(std::string_view(stripped).substr(0, eq));
    const auto value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty() || value.empty()) throw Error(where + ": empty key or value");
    if (!seen.insert(key).second) throw Error(where + ": duplicate key '" + key + "'");
    if (key == "experiment") {
      cfg.experiment = value;
    } else if (key == "model") {
      cfg.model = value;
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "levels") {
      cfg.levels = parse_unsigned(value, where);
    } else if (key == "resolution") {
      cfg.resolution = parse_unsigned(value, where);
    } else if (key == "seed") {
      cfg.seed = parse_unsigned(value, where);
    } else if (known_numeric_keys().count(key)) {
      std::vector<double> vals;
      std::string item;
      std::istringstream items(value);
      while (std::getline(items, item, ',')) vals.push_back(parse_double(trim(item), where));
      if (vals.empty()) throw Error(where + ": empty list");
      cfg.params[key] = std::move(vals);
    } else {
      throw Error(where + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

double ExperimentConfig::number(const std::string& key) const {
  const auto& v = list(key);
  if (v.size() != 1) throw Error("parameter '" + key + "' must have a single value");
  return v.front();
}

double ExperimentConfig::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

const std::vector<double>& ExperimentConfig::list(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw Error("missing parameter '" + key + "'");
  return it->second;
}

std::vector<double> ExperimentConfig::list_or(const std::string& key,
                                              std::vector<double> fallback) const {
  return has(key) ? list(key) : fallback;
}

void ExperimentConfig::validate() const {
  const auto& table = experiment_table();
  const auto it = table.find(experiment);
  if (it == table.end())
    throw Error(experiment.empty() ? "config: missing 'experiment'"
                                   : "config: unknown experiment '" + experiment + "'");
  const auto& spec = it->second;
  if (spec.needs_model && model.empty())
    throw Error("config: experiment '" + experiment + "' requires 'model'");
  const auto m = resolve_model(*this);

  for (const auto& key : spec.required)
    if (!has(key)) throw Error("config: experiment '" + experiment + "' requires '" + key + "'");
  for (const auto& [key, vals] : params) {
    const bool allowed =
        std::find(spec.required.begin(), spec.required.end(), key) != spec.required.end() ||
        std::find(spec.optional.begin(), spec.optional.end(), key) != spec.optional.end();
    if (!allowed)
      throw Error("config: parameter '" + key + "' does not apply to '" + experiment + "'");
    if (vals.size() != 1 && !spec.list_valued.count(key))
      throw Error("config: parameter '" + key + "' must have a single value");
    for (double v : vals)
      if (std::isnan(v)) throw Error("config: parameter '" + key + "' is NaN");
  }

  const auto positive = [&](const std::string& key) {
    if (has(key))
      for (double v : list(key))
        if (!(v > 0.0)) throw Error("config: '" + key + "' must be positive");
  };
  positive("r");
  positive("trials");
  positive("tol");
  positive("probe_levels");
  positive("margin");
  if (has("gamma"))
    for (double g : list("gamma"))
      if (!(g > 1.0)) throw Error("config: gamma must exceed 1");

  const bool needs_grid = experiment == "plancherel" || experiment == "trace-formula" ||
                          experiment == "nuclearity-threshold";
  if (needs_grid && !m.has_evaluators())
    throw Error("config: experiment '" + experiment + "' needs eigenfunction evaluators; model '" +
                m.id() + "' is spectral-only");
  if (experiment == "nuclearity-threshold") {
    const double r = number_or("r", 1.0);
    if (!(r <= 1.0)) throw Error("config: r-nuclearity requires 0 < r <= 1");
    for (const char* key : {"p1", "p2"})
      if (has(key) && !(number(key) >= 1.0 && std::isfinite(number(key))))
        throw Error(std::string("config: ") + key + " must lie in [1, inf)");
  }
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  out << "experiment = " << experiment << '\n';
  if (!model.empty()) out << "model = " << model << '\n';
  if (levels != 0) out << "levels = " << levels << '\n';
  if (resolution != 0) out << "resolution = " << resolution << '\n';
  out << "seed = " << seed << '\n';
  if (!output.empty()) out << "output = " << output << '\n';
  for (const auto& [k, vs] : params) {
    out << k << " = ";
    for (std::size_t i = 0; i < vs.size(); ++i) out << (i ? "," : "") << fmt_double(vs[i]);
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// ExperimentReport

std::string ExperimentReport::to_json(bool include_wall_time) const {
  ojson j;
  j["schema"] = "ellspec-report/1";
  j["experiment"] = config.experiment;
  j["config"] = config_json(config);
  j["status"] = to_string(status);
  ojson arr = ojson::array();
  for (const auto& c : cases) {
    ojson cj;
    cj["name"] = c.name;
    cj["value"] = number_json(c.value);
    cj["status"] = to_string(c.status);
    ojson vals = ojson::object();
    for (const auto& [k, v] : c.values) vals[k] = number_json(v);
    cj["values"] = vals;
    ojson labels = ojson::object();
    for (const auto& [k, v] : c.labels) labels[k] = v;
    cj["labels"] = labels;
    if (c.has_series) {
      ojson sums = ojson::array();
      for (double b : c.block_sums) sums.push_back(number_json(b));
      cj["series"] = {{"partial_sum", number_json(c.partial_sum)},
                      {"fitted_exponent", number_json(c.fitted_exponent)},
                      {"verdict", to_string(c.verdict)},
                      {"block_sums", sums}};
    }
    if (!c.error.empty()) cj["error"] = c.error;
    arr.push_back(std::move(cj));
  }
  j["cases"] = std::move(arr);
  if (include_wall_time) j["wall_time_seconds"] = wall_time_seconds;
  return j.dump(2);
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream out;
  out << "case,value,partial_sum,fitted_exponent,verdict,status\n";
  for (const auto& c : cases) {
    out << '"' << c.name << "\"," << fmt_double(c.value) << ',' << fmt_double(c.partial_sum)
        << ',' << (c.has_series ? fmt_double(c.fitted_exponent) : "nan") << ','
        << (c.has_series ? to_string(c.verdict) : "n/a") << ',' << to_string(c.status) << '\n';
  }
  return out.str();
}

std::string ExperimentReport::to_plot_data() const {
  std::ostringstream out;
  out << "# case block log2_block_sum\n";
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& sums = cases[i].block_sums;
    for (std::size_t k = 0; k < sums.size(); ++k)
      out << i << ' ' << k << ' ' << fmt_double(sums[k] > 0.0 ? std::log2(sums[k]) : -kInfinity)
          << '\n';
  }
  return out.str();
}

const CaseResult* ExperimentReport::primary_case() const {
  for (const auto& c : cases)
    if (c.has_series) return &c;
  return cases.empty() ? nullptr : &cases.front();
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  static const std::map<std::string, std::function<std::vector<CaseResult>(const ExperimentConfig&)>>
      runners = {
          {"plancherel", run_plancherel},
          {"invariance", run_invariance},
          {"schatten-identity", run_schatten_identity},
          {"trace-formula", run_trace_formula},
          {"kernel-sobolev", run_kernel_sobolev},
          {"subelliptic-threshold", run_subelliptic},
          {"schrodinger-threshold", run_schrodinger},
          {"nuclearity-threshold", run_nuclearity},
      };
  ExperimentReport report;
  report.config = cfg;
  try {
    report.cases = runners.at(cfg.experiment)(cfg);
  } catch (const std::exception& e) {
    CaseResult c;
    c.name = "setup";
    c.status = CheckStatus::Fail;
    c.error = e.what();
    report.cases.push_back(std::move(c));
  }
  report.status = overall(report.cases);
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!cfg.output.empty()) write_report(report, cfg.output);
  return report;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& prefix) {
  const auto write = [&](const std::string& ext, const std::string& body) {
    auto path = prefix;
    path += ext;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << body;
  };
  write(".json", report.to_json() + "\n");
  write(".csv", report.to_csv());
  write(".dat", report.to_plot_data());
}

std::vector<ExperimentReport> sweep(const ExperimentConfig& cfg, const std::string& parameter,
                                    const std::vector<double>& values, unsigned jobs) {
  std::vector<ExperimentConfig> configs;
  for (double v : values) {
    ExperimentConfig c = cfg;
    c.output.clear();
    if (parameter == "levels") {
      c.levels = static_cast<std::size_t>(v);
    } else if (parameter == "resolution") {
      c.resolution = static_cast<std::size_t>(v);
    } else if (parameter == "seed") {
      c.seed = static_cast<std::uint64_t>(v);
    } else if (known_numeric_keys().count(parameter)) {
      c.params[parameter] = {v};
    } else {
      throw Error("sweep: unknown parameter '" + parameter + "'");
    }
    c.validate();
    configs.push_back(std::move(c));
  }

  std::vector<ExperimentReport> reports(configs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++)
      reports[i] = run_experiment(configs[i]);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return reports;
}

std::string sweep_csv(const std::vector<ExperimentReport>& reports,
                      const std::vector<double>& values) {
  if (reports.size() != values.size()) throw Error("sweep_csv: size mismatch");
  std::ostringstream out;
  out << "value,partial_sum,fitted_exponent,verdict\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto* c = reports[i].primary_case();
    out << fmt_double(values[i]) << ',';
    if (c == nullptr) {
      out << "nan,nan,inconclusive\n";
      continue;
    }
    out << fmt_double(c->partial_sum) << ','
        << (c->has_series ? fmt_double(c->fitted_exponent) : "nan") << ','
        << (c->has_series ? to_string(c->verdict) : to_string(reports[i].status)) << '\n';
  }
  return out.str();
}

}  // namespace ellspec
