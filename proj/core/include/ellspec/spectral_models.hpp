#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ellspec/matrix.hpp"

namespace ellspec {

enum class ModelKind {
  TorusCircle,
  Torus2,
  Sphere2,
  Sphere3Laplacian,
  SU2SubLaplacian,
  SO3Schrodinger,
};

/// A model closed manifold together with its positive operator E.
///
/// Canonical ids: "t1", "t2", "s2", "s3", "su2-sub", "so3-h<gamma>".
struct ManifoldModel {
  ModelKind kind = ModelKind::TorusCircle;
  int dimension = 1;
  double order = 2.0;
  double gamma = 1.0;  // SO3Schrodinger only
  double shift = 0.0;  // SO3Schrodinger only

  static ManifoldModel make(ModelKind kind, double gamma = 2.0, double shift = 0.0);
  static ManifoldModel parse(std::string_view id);

  std::string id() const;
  /// False for the spectral-only models (sub-Laplacian, Schrodinger family).
  bool has_evaluators() const noexcept;
  /// Volume of M in the chosen measure (round / Lebesgue).
  double volume() const;
};

/// Coordinates of a point on a model manifold. Tori use angles (x[0], x[1]);
/// spheres use Cartesian coordinates of the standard embedding.
using Point = std::array<double, 4>;

/// Evaluates all d orthonormal eigenfunctions of one level at a point.
class LevelBasis {
 public:
  virtual ~LevelBasis() = default;
  virtual std::size_t size() const noexcept = 0;
  virtual void evaluate(const Point& x, std::span<Complex> out) const = 0;
};

struct EigenLevel {
  double lambda = 0.0;
  std::size_t multiplicity = 0;
  std::shared_ptr<const LevelBasis> basis;  // null for spectral-only models

  bool has_evaluator() const noexcept { return basis != nullptr; }
  /// e_l^k(x), k zero-based.
  Complex eval(std::size_t k, const Point& x) const;
  void eval_all(const Point& x, std::span<Complex> out) const;
};

struct SpectrumOptions {
  /// Largest multiplicity a single retained level may have.
  std::size_t max_multiplicity = std::size_t{1} << 22;
};

/// Spectral data of E truncated to the first `level_cap` distinct eigenvalues.
///
/// Flattened basis index is level-major, basis-index-minor:
///   flat(l, k) = offset(l) + k,  offset(l) = d_0 + ... + d_{l-1}.
class EigenStructure {
 public:
  EigenStructure(ManifoldModel model, std::vector<EigenLevel> levels);

  const ManifoldModel& model() const noexcept { return model_; }
  std::size_t level_cap() const noexcept { return levels_.size(); }
  const std::vector<EigenLevel>& levels() const noexcept { return levels_; }
  const EigenLevel& level(std::size_t l) const { return levels_.at(l); }

  /// Total number of retained basis functions N = sum of multiplicities.
  std::size_t dimension() const noexcept { return offsets_.back(); }
  std::size_t offset(std::size_t l) const { return offsets_.at(l); }
  std::size_t flat_index(std::size_t l, std::size_t k) const;
  /// Inverse of flat_index: (level, k).
  std::pair<std::size_t, std::size_t> unflatten(std::size_t flat) const;

  std::vector<std::size_t> multiplicities() const;
  /// Eigenvalue of each flattened basis function.
  std::vector<double> flat_eigenvalues() const;
  double max_lambda() const noexcept { return levels_.back().lambda; }
  bool has_evaluators() const noexcept;

  /// Evaluate every retained basis function at x (length dimension()).
  void eval_all(const Point& x, std::span<Complex> out) const;

 private:
  ManifoldModel model_;
  std::vector<EigenLevel> levels_;
  std::vector<std::size_t> offsets_;
};

EigenStructure build_spectrum(const ManifoldModel& model, std::size_t level_cap,
                              const SpectrumOptions& options = {});

/// Sum of multiplicities over levels with lambda <= lambda_max. Throws when
/// lambda_max lies beyond the retained spectrum.
std::size_t weyl_count(const EigenStructure& es, double lambda_max);

/// Eigenvalue of -(X^2+Y^2) on SU(2) at spin l = two_l/2, weight n = two_n/2.
/// Returned as 4*mu, which is always an integer.
std::int64_t su2_sublaplacian_eigenvalue_x4(std::int64_t two_l, std::int64_t two_n);
double su2_sublaplacian_eigenvalue(double l, double n);

/// Eigenvalue of iZ - gamma(X^2+Y^2) + c on SO(3) at (l, m).
double so3_schrodinger_eigenvalue(double gamma, double shift, std::int64_t l,
                                  std::int64_t m);

// ---------------------------------------------------------------------------
// Quadrature

enum class QuadratureRule {
  Gauss,    // Gauss-Legendre in the polar variable
  Lobatto,  // Gauss-Lobatto: includes the poles, used for sup-norm probing
};

struct QuadratureGrid {
  ModelKind kind = ModelKind::TorusCircle;
  std::size_t resolution = 0;
  std::vector<Point> points;
  std::vector<double> weights;
  /// Products of any two eigenfunctions with eigenvalue <= this are
  /// integrated exactly (to rounding).
  double max_exact_lambda = 0.0;

  std::size_t size() const noexcept { return points.size(); }
  double total_weight() const;
};

/// Tensor-product rule on the model manifold:
///   t1/t2: uniform trapezoid, `resolution` points per angle
///   s2:    `resolution` nodes in cos(theta) x 2*resolution uniform in phi
///   s3:    Hopf/Euler coordinates, `resolution` nodes in cos(beta) x
///          (2*resolution)^2 uniform in the two phase angles
QuadratureGrid quadrature_grid(const ManifoldModel& model, std::size_t resolution,
                               QuadratureRule rule = QuadratureRule::Gauss);

/// Smallest resolution whose grid integrates products of all retained
/// eigenfunctions exactly.
std::size_t required_resolution(const EigenStructure& es,
                                 QuadratureRule rule = QuadratureRule::Gauss);

// ---------------------------------------------------------------------------
// Explicit bases (exposed for tests and tools)

/// Real orthonormal spherical harmonics of degree l on S^2, ordered
/// m = -l..l, at the direction with the given polar cosine and azimuth.
void real_spherical_harmonics(int l, double cos_theta, double phi, std::span<double> out);

/// Hyperspherical harmonics of degree l on S^3 at the unit vector x.
/// Ordered by (j, m) with j = 0..l, m = -j..j; (l+1)^2 values.
void s3_harmonics(int l, const Point& x, std::span<double> out);

}  // namespace ellspec
