#pragma once

#include <string>
#include <vector>

#include "ellspec/matrix.hpp"
#include "ellspec/spectral_models.hpp"

namespace ellspec {

/// Samples of a function at the points of a QuadratureGrid.
struct GridFunction {
  std::vector<Complex> samples;
};

/// Ragged per-level coefficient vectors: entry l has d_l components.
class FourierCoefficients {
 public:
  FourierCoefficients() = default;
  FourierCoefficients(std::string model_id, std::vector<std::vector<Complex>> per_level);

  static FourierCoefficients zeros(const EigenStructure& es);
  /// Coefficients from a flattened (level-major) vector.
  static FourierCoefficients from_flat(const EigenStructure& es,
                                       std::span<const Complex> flat);

  const std::string& model_id() const noexcept { return model_id_; }
  std::size_t level_count() const noexcept { return per_level_.size(); }
  std::vector<Complex>& level(std::size_t l) { return per_level_.at(l); }
  const std::vector<Complex>& level(std::size_t l) const { return per_level_.at(l); }
  std::vector<Complex> flatten() const;
  double squared_norm() const;

  /// Throws unless the shape matches es level by level.
  void check_shape(const EigenStructure& es) const;

 private:
  std::string model_id_;
  std::vector<std::vector<Complex>> per_level_;
};

/// Values of every retained basis function at every grid point
/// (rows = points, columns = flattened basis index).
struct BasisTable {
  CMatrix values;
};

BasisTable make_basis_table(const EigenStructure& es, const QuadratureGrid& grid);

/// fhat(l, k) = sum_x w(x) f(x) conj(e_l^k(x)).
FourierCoefficients forward_transform(const GridFunction& f, const EigenStructure& es,
                                      const QuadratureGrid& grid);
FourierCoefficients forward_transform(const GridFunction& f, const EigenStructure& es,
                                      const QuadratureGrid& grid, const BasisTable& table);

/// f(x) = sum_{l,k} fhat(l, k) e_l^k(x) at the grid points.
GridFunction inverse_transform(const FourierCoefficients& coeffs, const EigenStructure& es,
                               const QuadratureGrid& grid);
GridFunction inverse_transform(const FourierCoefficients& coeffs, const EigenStructure& es,
                               const QuadratureGrid& grid, const BasisTable& table);

/// | ||f||^2 - sum |fhat|^2 |: the energy of f outside the retained levels.
double plancherel_defect(const GridFunction& f, const EigenStructure& es,
                         const QuadratureGrid& grid);

/// (f, g) = sum_x w f conj(g).
Complex grid_inner(const GridFunction& f, const GridFunction& g, const QuadratureGrid& grid);
double grid_norm2(const GridFunction& f, const QuadratureGrid& grid);
/// Weighted p-th power sum norm; p = infinity gives the max over samples.
double grid_lp_norm(const GridFunction& f, const QuadratureGrid& grid, double p);

/// Band-limited test function with uniformly distributed coefficients.
FourierCoefficients random_coefficients(const EigenStructure& es, class Lcg& rng);

}  // namespace ellspec
