#include "ellspec/spectral_models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ellspec/quadrature.hpp"

namespace ellspec {

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Associated Legendre functions normalized so that
//   Ybar_l^m(theta, phi) = P_l^m(cos theta) e^{i m phi}
// is L2-normalized on S^2. Table index: l*(l+1)/2 + m, 0 <= m <= l.

std::size_t plm_index(int l, int m) {
  return static_cast<std::size_t>(l) * static_cast<std::size_t>(l + 1) / 2 +
         static_cast<std::size_t>(m);
}

std::vector<double> normalized_legendre_table(int lmax, double x) {
  std::vector<double> p(plm_index(lmax, lmax) + 1, 0.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  double pmm = std::sqrt(1.0 / (4.0 * kPi));
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    p[plm_index(m, m)] = pmm;
    if (m + 1 <= lmax) p[plm_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * pmm;
    for (int l = m + 2; l <= lmax; ++l) {
      const double ll = l, mm = m;
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
      const double b =
          std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      p[plm_index(l, m)] = a * (x * p[plm_index(l - 1, m)] - b * p[plm_index(l - 2, m)]);
    }
  }
  return p;
}

void fill_real_harmonics(const std::vector<double>& table, int l, double phi,
                         std::span<double> out) {
  out[static_cast<std::size_t>(l)] = table[plm_index(l, 0)];
  for (int m = 1; m <= l; ++m) {
    const double v = std::numbers::sqrt2 * table[plm_index(l, m)];
    out[static_cast<std::size_t>(l + m)] = v * std::cos(m * phi);
    out[static_cast<std::size_t>(l - m)] = v * std::sin(m * phi);
  }
}

// Gegenbauer C_n^{(a)}(x).
double gegenbauer(int n, double a, double x) {
  if (n == 0) return 1.0;
  double c0 = 1.0;
  double c1 = 2.0 * a * x;
  for (int k = 1; k < n; ++k) {
    const double c2 = (2.0 * x * (k + a) * c1 - (k + 2.0 * a - 1.0) * c0) / (k + 1.0);
    c0 = c1;
    c1 = c2;
  }
  return c1;
}

// ---------------------------------------------------------------------------
// Level bases

class CircleBasis final : public LevelBasis {
 public:
  explicit CircleBasis(int freq) : freq_(freq) {}
  std::size_t size() const noexcept override { return freq_ == 0 ? 1 : 2; }
  void evaluate(const Point& x, std::span<Complex> out) const override {
    if (freq_ == 0) {
      out[0] = 1.0 / std::sqrt(2.0 * kPi);
      return;
    }
    const double c = 1.0 / std::sqrt(kPi);
    out[0] = c * std::cos(freq_ * x[0]);
    out[1] = c * std::sin(freq_ * x[0]);
  }

 private:
  int freq_;
};

// Factor of a product basis function on T^2: frequency and cos (0) / sin (1).
struct TorusFactor {
  int freq;
  int kind;
};

double torus_factor(const TorusFactor& f, double angle) {
  if (f.freq == 0) return 1.0 / std::sqrt(2.0 * kPi);
  const double c = 1.0 / std::sqrt(kPi);
  return f.kind == 0 ? c * std::cos(f.freq * angle) : c * std::sin(f.freq * angle);
}

class Torus2Basis final : public LevelBasis {
 public:
  explicit Torus2Basis(std::vector<std::pair<TorusFactor, TorusFactor>> fns)
      : fns_(std::move(fns)) {}
  std::size_t size() const noexcept override { return fns_.size(); }
  void evaluate(const Point& x, std::span<Complex> out) const override {
    for (std::size_t i = 0; i < fns_.size(); ++i)
      out[i] = torus_factor(fns_[i].first, x[0]) * torus_factor(fns_[i].second, x[1]);
  }

 private:
  std::vector<std::pair<TorusFactor, TorusFactor>> fns_;
};

class Sphere2Basis final : public LevelBasis {
 public:
  explicit Sphere2Basis(int l) : l_(l) {}
  std::size_t size() const noexcept override { return 2 * static_cast<std::size_t>(l_) + 1; }
  void evaluate(const Point& x, std::span<Complex> out) const override {
    std::vector<double> vals(size());
    const double phi = std::atan2(x[1], x[0]);
    real_spherical_harmonics(l_, std::clamp(x[2], -1.0, 1.0), phi, vals);
    for (std::size_t i = 0; i < vals.size(); ++i) out[i] = vals[i];
  }

 private:
  int l_;
};

class Sphere3Basis final : public LevelBasis {
 public:
  explicit Sphere3Basis(int l) : l_(l) {}
  std::size_t size() const noexcept override {
    return static_cast<std::size_t>(l_ + 1) * static_cast<std::size_t>(l_ + 1);
  }
  void evaluate(const Point& x, std::span<Complex> out) const override {
    std::vector<double> vals(size());
    s3_harmonics(l_, x, vals);
    for (std::size_t i = 0; i < vals.size(); ++i) out[i] = vals[i];
  }

 private:
  int l_;
};

// ---------------------------------------------------------------------------
// Level enumeration helpers

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<EigenLevel> torus2_levels(std::size_t cap) {
  for (std::int64_t bound = std::max<std::int64_t>(8, static_cast<std::int64_t>(cap));;
       bound *= 2) {
    std::map<std::int64_t, std::vector<std::pair<int, int>>> by_value;
    for (std::int64_t a = 0; a * a <= bound; ++a)
      for (std::int64_t b = 0; a * a + b * b <= bound; ++b)
        by_value[a * a + b * b].emplace_back(static_cast<int>(a), static_cast<int>(b));
    if (by_value.size() < cap) continue;
    std::vector<EigenLevel> levels;
    for (const auto& [value, pairs] : by_value) {
      if (levels.size() == cap) break;
      std::vector<std::pair<TorusFactor, TorusFactor>> fns;
      for (const auto& [a, b] : pairs) {
        const int na = a == 0 ? 1 : 2;
        const int nb = b == 0 ? 1 : 2;
        for (int ta = 0; ta < na; ++ta)
          for (int tb = 0; tb < nb; ++tb) fns.push_back({{a, ta}, {b, tb}});
      }
      EigenLevel lev;
      lev.lambda = static_cast<double>(value);
      lev.multiplicity = fns.size();
      lev.basis = std::make_shared<Torus2Basis>(std::move(fns));
      levels.push_back(std::move(lev));
    }
    return levels;
  }
}

std::vector<EigenLevel> su2_levels(std::size_t cap) {
  // mu >= l, so every index with mu <= bound has l <= bound.
  for (std::int64_t bound = std::max<std::int64_t>(4, static_cast<std::int64_t>(cap) / 2);;
       bound *= 2) {
    std::map<std::int64_t, std::size_t> mult;  // 4*mu -> multiplicity
    for (std::int64_t two_l = 0; two_l <= 2 * bound; ++two_l) {
      // 4 mu <= 4 bound  <=>  two_n^2 >= two_l (two_l + 2) - 4 bound
      const std::int64_t need = two_l * (two_l + 2) - 4 * bound;
      std::int64_t start = 0;
      if (need > 0) {
        start = static_cast<std::int64_t>(std::sqrt(static_cast<double>(need)));
        while (start * start < need) ++start;
        while (start > 0 && (start - 1) * (start - 1) >= need) --start;
      }
      if ((two_l - start) % 2 != 0) ++start;
      for (std::int64_t two_n = start; two_n <= two_l; two_n += 2) {
        const std::int64_t v4 = su2_sublaplacian_eigenvalue_x4(two_l, two_n);
        if (v4 > 4 * bound) continue;
        const auto d = static_cast<std::size_t>(two_l + 1);
        mult[v4] += two_n == 0 ? d : 2 * d;  // +-n share the eigenvalue
      }
    }
    if (mult.size() < cap) continue;
    std::vector<EigenLevel> levels;
    for (const auto& [v4, d] : mult) {
      if (levels.size() == cap) break;
      levels.push_back({static_cast<double>(v4) / 4.0, d, nullptr});
    }
    return levels;
  }
}

std::vector<EigenLevel> so3_levels(const ManifoldModel& model, std::size_t cap) {
  const double g = model.gamma;
  const double c = model.shift;
  if (!(g > 1.0))
    throw Error("so3 Schrodinger model requires gamma > 1 for a discrete spectrum "
                "with finite multiplicities (got gamma = " + std::to_string(g) + ")");
  // Minimum over |m| <= l of the eigenvalue is (gamma - 1) l + c.
  for (double bound = std::max(8.0, static_cast<double>(cap)) + std::abs(c);;
       bound *= 2.0) {
    std::vector<std::pair<double, std::size_t>> values;
    const auto lmax = static_cast<std::int64_t>(std::floor((bound - c) / (g - 1.0)));
    for (std::int64_t l = 0; l <= lmax; ++l) {
      const auto d = static_cast<std::size_t>(2 * l + 1);
      // The eigenvalue grows monotonically as |m| decreases from l (gamma > 1),
      // so walk inward from both ends and stop at the bound.
      std::int64_t hi = l;
      for (; hi >= 0; --hi) {
        const double v = so3_schrodinger_eigenvalue(g, c, l, hi);
        if (v > bound) break;
        values.emplace_back(v, d);
      }
      for (std::int64_t m = -l; m < 0 && m <= hi; ++m) {
        const double v = so3_schrodinger_eigenvalue(g, c, l, m);
        if (v > bound) break;
        values.emplace_back(v, d);
      }
    }
    std::sort(values.begin(), values.end());
    std::vector<EigenLevel> levels;
    for (const auto& [v, d] : values) {
      if (!levels.empty() && nearly_equal(levels.back().lambda, v))
        levels.back().multiplicity += d;
      else
        levels.push_back({v, d, nullptr});
    }
    // The largest value can still gain multiplicity from indices above the
    // bound only if it sits at the bound; require one spare level.
    if (levels.size() <= cap) continue;
    levels.resize(cap);
    return levels;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ManifoldModel

ManifoldModel ManifoldModel::make(ModelKind kind, double gamma, double shift) {
  ManifoldModel m;
  m.kind = kind;
  m.order = 2.0;
  switch (kind) {
    case ModelKind::TorusCircle: m.dimension = 1; break;
    case ModelKind::Torus2: m.dimension = 2; break;
    case ModelKind::Sphere2: m.dimension = 2; break;
    case ModelKind::Sphere3Laplacian:
    case ModelKind::SU2SubLaplacian:
    case ModelKind::SO3Schrodinger: m.dimension = 3; break;
  }
  if (kind == ModelKind::SO3Schrodinger) {
    if (!(gamma > 0.0)) throw Error("so3 Schrodinger model requires gamma > 0");
    m.gamma = gamma;
    m.shift = shift;
  }
  return m;
}

ManifoldModel ManifoldModel::parse(std::string_view id) {
  if (id == "t1") return make(ModelKind::TorusCircle);
  if (id == "t2") return make(ModelKind::Torus2);
  if (id == "s2") return make(ModelKind::Sphere2);
  if (id == "s3") return make(ModelKind::Sphere3Laplacian);
  if (id == "su2-sub") return make(ModelKind::SU2SubLaplacian);
  constexpr std::string_view prefix = "so3-h";
  if (id.starts_with(prefix)) {
    const auto rest = id.substr(prefix.size());
    double gamma = 0.0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), gamma);
    if (ec != std::errc{} || ptr != rest.data() + rest.size() || rest.empty())
      throw Error("bad gamma in model id '" + std::string(id) + "'");
    return make(ModelKind::SO3Schrodinger, gamma);
  }
  throw Error("unsupported model id '" + std::string(id) + "'");
}

std::string ManifoldModel::id() const {
  switch (kind) {
    case ModelKind::TorusCircle: return "t1";
    case ModelKind::Torus2: return "t2";
    case ModelKind::Sphere2: return "s2";
    case ModelKind::Sphere3Laplacian: return "s3";
    case ModelKind::SU2SubLaplacian: return "su2-sub";
    case ModelKind::SO3Schrodinger: {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof buf, gamma);
      return "so3-h" + std::string(buf, res.ptr);
    }
  }
  return "?";
}

bool ManifoldModel::has_evaluators() const noexcept {
  return kind != ModelKind::SU2SubLaplacian && kind != ModelKind::SO3Schrodinger;
}

double ManifoldModel::volume() const {
  switch (kind) {
    case ModelKind::TorusCircle: return 2.0 * kPi;
    case ModelKind::Torus2: return 4.0 * kPi * kPi;
    case ModelKind::Sphere2: return 4.0 * kPi;
    default: return 2.0 * kPi * kPi;  // S^3 ~ SU(2); SO(3) uses the same normalization
  }
}

// ---------------------------------------------------------------------------
// EigenLevel / EigenStructure

Complex EigenLevel::eval(std::size_t k, const Point& x) const {
  if (!basis) throw Error("eigenfunction evaluation requested on a spectral-only model");
  if (k >= multiplicity) throw Error("basis index out of range");
  std::vector<Complex> all(multiplicity);
  basis->evaluate(x, all);
  return all[k];
}

void EigenLevel::eval_all(const Point& x, std::span<Complex> out) const {
  if (!basis) throw Error("eigenfunction evaluation requested on a spectral-only model");
  basis->evaluate(x, out.first(multiplicity));
}

EigenStructure::EigenStructure(ManifoldModel model, std::vector<EigenLevel> levels)
    : model_(model), levels_(std::move(levels)) {
  if (levels_.empty()) throw Error("EigenStructure needs at least one level");
  offsets_.reserve(levels_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    if (levels_[l].multiplicity == 0) throw Error("level with zero multiplicity");
    if (l > 0 && !(levels_[l].lambda > levels_[l - 1].lambda))
      throw Error("eigenvalue levels must be strictly increasing");
    offsets_.push_back(offsets_.back() + levels_[l].multiplicity);
  }
}

std::size_t EigenStructure::flat_index(std::size_t l, std::size_t k) const {
  if (l >= levels_.size() || k >= levels_[l].multiplicity)
    throw Error("flat_index: (level, k) out of range");
  return offsets_[l] + k;
}

std::pair<std::size_t, std::size_t> EigenStructure::unflatten(std::size_t flat) const {
  if (flat >= dimension()) throw Error("unflatten: index out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), flat);
  const auto l = static_cast<std::size_t>(std::distance(offsets_.begin(), it)) - 1;
  return {l, flat - offsets_[l]};
}

std::vector<std::size_t> EigenStructure::multiplicities() const {
  std::vector<std::size_t> d;
  d.reserve(levels_.size());
  for (const auto& lev : levels_) d.push_back(lev.multiplicity);
  return d;
}

std::vector<double> EigenStructure::flat_eigenvalues() const {
  std::vector<double> out;
  out.reserve(dimension());
  for (const auto& lev : levels_) out.insert(out.end(), lev.multiplicity, lev.lambda);
  return out;
}

bool EigenStructure::has_evaluators() const noexcept {
  return std::all_of(levels_.begin(), levels_.end(),
                     [](const EigenLevel& l) { return l.has_evaluator(); });
}

void EigenStructure::eval_all(const Point& x, std::span<Complex> out) const {
  if (out.size() != dimension()) throw Error("eval_all: output length mismatch");
  for (std::size_t l = 0; l < levels_.size(); ++l)
    levels_[l].eval_all(x, out.subspan(offsets_[l], levels_[l].multiplicity));
}

EigenStructure build_spectrum(const ManifoldModel& model, std::size_t level_cap,
                              const SpectrumOptions& options) {
  if (level_cap == 0) throw Error("build_spectrum: level_cap must be >= 1");
  std::vector<EigenLevel> levels;
  switch (model.kind) {
    case ModelKind::TorusCircle:
      for (std::size_t j = 0; j < level_cap; ++j) {
        const int f = static_cast<int>(j);
        levels.push_back({static_cast<double>(j * j), j == 0 ? 1u : 2u,
                          std::make_shared<CircleBasis>(f)});
      }
      break;
    case ModelKind::Torus2:
      levels = torus2_levels(level_cap);
      break;
    case ModelKind::Sphere2:
      for (std::size_t l = 0; l < level_cap; ++l)
        levels.push_back({static_cast<double>(l * (l + 1)), 2 * l + 1,
                          std::make_shared<Sphere2Basis>(static_cast<int>(l))});
      break;
    case ModelKind::Sphere3Laplacian:
      for (std::size_t l = 0; l < level_cap; ++l)
        levels.push_back({static_cast<double>(l * (l + 2)), (l + 1) * (l + 1),
                          std::make_shared<Sphere3Basis>(static_cast<int>(l))});
      break;
    case ModelKind::SU2SubLaplacian:
      levels = su2_levels(level_cap);
      break;
    case ModelKind::SO3Schrodinger:
      levels = so3_levels(model, level_cap);
      break;
  }
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (levels[l].multiplicity > options.max_multiplicity) {
      std::ostringstream msg;
      msg << "build_spectrum(" << model.id() << ", " << level_cap << "): level " << l
          << " has multiplicity " << levels[l].multiplicity
          << ", exceeding the max_multiplicity budget of " << options.max_multiplicity;
      throw Error(msg.str());
    }
  }
  return EigenStructure(model, std::move(levels));
}

std::size_t weyl_count(const EigenStructure& es, double lambda_max) {
  if (lambda_max > es.max_lambda())
    throw Error("weyl_count: lambda_max " + std::to_string(lambda_max) +
                " is beyond the retained spectrum (largest " +
                std::to_string(es.max_lambda()) + ")");
  std::size_t count = 0;
  for (const auto& lev : es.levels()) {
    if (lev.lambda > lambda_max) break;
    count += lev.multiplicity;
  }
  return count;
}

std::int64_t su2_sublaplacian_eigenvalue_x4(std::int64_t two_l, std::int64_t two_n) {
  if (two_l < 0 || std::abs(two_n) > two_l || (two_l - two_n) % 2 != 0)
    throw Error("su2 sub-Laplacian: invalid (l, n)");
  return two_l * (two_l + 2) - two_n * two_n;
}

double su2_sublaplacian_eigenvalue(double l, double n) {
  return static_cast<double>(su2_sublaplacian_eigenvalue_x4(std::llround(2.0 * l),
                                                            std::llround(2.0 * n))) /
         4.0;
}

double so3_schrodinger_eigenvalue(double gamma, double shift, std::int64_t l,
                                  std::int64_t m) {
  if (l < 0 || std::abs(m) > l) throw Error("so3 Schrodinger: invalid (l, m)");
  const auto ld = static_cast<double>(l);
  const auto md = static_cast<double>(m);
  return gamma * (ld * (ld + 1.0) - md * md) - md + shift;
}

// ---------------------------------------------------------------------------
// Explicit bases

void real_spherical_harmonics(int l, double cos_theta, double phi, std::span<double> out) {
  if (l < 0 || out.size() < static_cast<std::size_t>(2 * l + 1))
    throw Error("real_spherical_harmonics: bad degree or output size");
  const auto table = normalized_legendre_table(l, cos_theta);
  fill_real_harmonics(table, l, phi, out);
}

void s3_harmonics(int l, const Point& x, std::span<double> out) {
  const auto n_out = static_cast<std::size_t>(l + 1) * static_cast<std::size_t>(l + 1);
  if (l < 0 || out.size() < n_out) throw Error("s3_harmonics: bad degree or output size");
  // x[0] = cos(chi); (x[1], x[2], x[3]) = sin(chi) * omega, omega on S^2.
  const double c = std::clamp(x[0], -1.0, 1.0);
  const double r = std::sqrt(x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
  const double cos_t = r > 0.0 ? std::clamp(x[3] / r, -1.0, 1.0) : 1.0;
  const double phi = std::atan2(x[2], x[1]);
  const auto table = normalized_legendre_table(l, cos_t);
  std::vector<double> ylm(2 * static_cast<std::size_t>(l) + 1);
  std::size_t pos = 0;
  double r_pow = 1.0;
  for (int j = 0; j <= l; ++j) {
    const int n = l - j;
    // norm^2 = int_0^pi sin^{2j+2}(chi) C_n^{(j+1)}(cos chi)^2 dchi
    const double log_norm2 = std::log(kPi) - (2.0 * j + 1.0) * std::log(2.0) +
                             std::lgamma(n + 2.0 * j + 2.0) - std::lgamma(n + 1.0) -
                             std::log(n + j + 1.0) - 2.0 * std::lgamma(j + 1.0);
    const double radial = gegenbauer(n, j + 1.0, c) * std::exp(-0.5 * log_norm2) * r_pow;
    fill_real_harmonics(table, j, phi, ylm);
    for (int m = 0; m <= 2 * j; ++m) out[pos++] = radial * ylm[static_cast<std::size_t>(m)];
    r_pow *= r;
  }
}

// ---------------------------------------------------------------------------
// Quadrature grids

double QuadratureGrid::total_weight() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

QuadratureGrid quadrature_grid(const ManifoldModel& model, std::size_t resolution,
                               QuadratureRule rule) {
  if (resolution < 2) throw Error("quadrature_grid: resolution must be >= 2");
  if (!model.has_evaluators())
    throw Error("quadrature_grid: model '" + model.id() +
                "' is spectral-only and has no grid scheme");
  QuadratureGrid g;
  g.kind = model.kind;
  g.resolution = resolution;
  const auto n = resolution;
  const double nd = static_cast<double>(n);
  const auto polar = [&](std::size_t count) {
    return rule == QuadratureRule::Lobatto ? gauss_lobatto(count) : gauss_legendre(count);
  };
  switch (model.kind) {
    case ModelKind::TorusCircle: {
      for (std::size_t i = 0; i < n; ++i) {
        g.points.push_back({2.0 * kPi * static_cast<double>(i) / nd, 0.0, 0.0, 0.0});
        g.weights.push_back(2.0 * kPi / nd);
      }
      const double j = std::floor((nd - 1.0) / 2.0);
      g.max_exact_lambda = (j + 1.0) * (j + 1.0) - 1.0;
      break;
    }
    case ModelKind::Torus2: {
      const double w = (2.0 * kPi / nd) * (2.0 * kPi / nd);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
          g.points.push_back({2.0 * kPi * static_cast<double>(i) / nd,
                              2.0 * kPi * static_cast<double>(k) / nd, 0.0, 0.0});
          g.weights.push_back(w);
        }
      // every lattice point with j^2 + k^2 < (J+1)^2 has |j|, |k| <= J
      const double j = std::floor((nd - 1.0) / 2.0);
      g.max_exact_lambda = (j + 1.0) * (j + 1.0) - 1.0;
      break;
    }
    case ModelKind::Sphere2: {
      const auto z = polar(n);
      const std::size_t m = 2 * n;
      for (std::size_t i = 0; i < n; ++i) {
        const double s = std::sqrt(std::max(0.0, 1.0 - z.nodes[i] * z.nodes[i]));
        for (std::size_t k = 0; k < m; ++k) {
          const double phi = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
          g.points.push_back({s * std::cos(phi), s * std::sin(phi), z.nodes[i], 0.0});
          g.weights.push_back(z.weights[i] * 2.0 * kPi / static_cast<double>(m));
        }
      }
      const double l = rule == QuadratureRule::Lobatto ? nd - 2.0 : nd - 1.0;
      g.max_exact_lambda = l * (l + 1.0);
      break;
    }
    case ModelKind::Sphere3Laplacian: {
      // x = (cos(eta) e^{i xi1}, sin(eta) e^{i xi2}), u = cos(2 eta);
      // dvol = sin(eta) cos(eta) deta dxi1 dxi2 = du dxi1 dxi2 / 4.
      const auto u = polar(n);
      const std::size_t m = 2 * n;
      const double dxi = 2.0 * kPi / static_cast<double>(m);
      for (std::size_t i = 0; i < n; ++i) {
        const double ce = std::sqrt(std::max(0.0, (1.0 + u.nodes[i]) / 2.0));
        const double se = std::sqrt(std::max(0.0, (1.0 - u.nodes[i]) / 2.0));
        for (std::size_t a = 0; a < m; ++a) {
          const double xi1 = dxi * static_cast<double>(a);
          for (std::size_t b = 0; b < m; ++b) {
            const double xi2 = dxi * static_cast<double>(b);
            g.points.push_back({ce * std::cos(xi1), ce * std::sin(xi1), se * std::cos(xi2),
                                se * std::sin(xi2)});
            g.weights.push_back(0.25 * u.weights[i] * dxi * dxi);
          }
        }
      }
      const double l = nd - 1.0;
      g.max_exact_lambda = l * (l + 2.0);
      break;
    }
    default:
      throw Error("quadrature_grid: unsupported model");
  }
  return g;
}

std::size_t required_resolution(const EigenStructure& es, QuadratureRule rule) {
  const double lam = es.max_lambda();
  switch (es.model().kind) {
    case ModelKind::TorusCircle:
    case ModelKind::Torus2: {
      const auto j = static_cast<std::size_t>(std::floor(std::sqrt(lam) + 1e-9));
      return std::max<std::size_t>(2, 2 * j + 1);
    }
    case ModelKind::Sphere2:
      return es.level_cap() + (rule == QuadratureRule::Lobatto ? 1 : 0) < 2
                 ? 2
                 : es.level_cap() + (rule == QuadratureRule::Lobatto ? 1 : 0);
    case ModelKind::Sphere3Laplacian:
      return std::max<std::size_t>(2, es.level_cap());
    default:
      throw Error("required_resolution: model '" + es.model().id() + "' is spectral-only");
  }
}

}  // namespace ellspec
