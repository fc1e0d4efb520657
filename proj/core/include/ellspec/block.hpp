#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "ellspec/matrix.hpp"

namespace ellspec {

/// A matrix block stored either densely or as a diagonal.
class Block {
 public:
  Block() = default;
  explicit Block(CMatrix dense) : storage_(std::move(dense)) {}
  explicit Block(std::vector<Complex> diag) : storage_(std::move(diag)) {}

  static Block zero(std::size_t rows, std::size_t cols);
  static Block scalar(std::size_t dim, Complex value);

  bool is_diagonal() const noexcept {
    return std::holds_alternative<std::vector<Complex>>(storage_);
  }
  std::size_t rows() const noexcept;
  std::size_t cols() const noexcept;

  Complex entry(std::size_t i, std::size_t j) const;
  /// y = B x
  void apply(std::span<const Complex> x, std::span<Complex> y) const;
  Complex trace() const;
  double frobenius_norm_squared() const;
  double hermitian_defect() const;

  CMatrix to_dense() const;
  const CMatrix& dense() const { return std::get<CMatrix>(storage_); }
  const std::vector<Complex>& diagonal() const {
    return std::get<std::vector<Complex>>(storage_);
  }

  /// Block product (this * rhs).
  Block compose(const Block& rhs) const;

  /// Calls fn(i, j, value) for every stored (possibly nonzero) entry.
  template <typename Fn>
  void for_each_entry(Fn&& fn) const {
    if (is_diagonal()) {
      const auto& d = diagonal();
      for (std::size_t i = 0; i < d.size(); ++i) fn(i, i, d[i]);
    } else {
      const auto& m = dense();
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) fn(i, j, m(i, j));
    }
  }

 private:
  std::variant<CMatrix, std::vector<Complex>> storage_;
};

}  // namespace ellspec
