#include "ellspec/block.hpp"

#include <algorithm>
#include <cmath>

namespace ellspec {

Block Block::zero(std::size_t rows, std::size_t cols) { return Block(CMatrix(rows, cols)); }

Block Block::scalar(std::size_t dim, Complex value) {
  return Block(std::vector<Complex>(dim, value));
}

std::size_t Block::rows() const noexcept {
  return is_diagonal() ? diagonal().size() : dense().rows();
}

std::size_t Block::cols() const noexcept {
  return is_diagonal() ? diagonal().size() : dense().cols();
}

Complex Block::entry(std::size_t i, std::size_t j) const {
  if (i >= rows() || j >= cols()) throw Error("Block::entry: index out of range");
  if (is_diagonal()) return i == j ? diagonal()[i] : Complex{};
  return dense()(i, j);
}

void Block::apply(std::span<const Complex> x, std::span<Complex> y) const {
  if (x.size() != cols() || y.size() != rows()) throw Error("Block::apply: length mismatch");
  if (is_diagonal()) {
    const auto& d = diagonal();
    for (std::size_t i = 0; i < d.size(); ++i) y[i] = d[i] * x[i];
    return;
  }
  const auto& m = dense();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Complex acc{};
    const auto r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
}

Complex Block::trace() const {
  if (is_diagonal()) {
    Complex t{};
    for (const auto& v : diagonal()) t += v;
    return t;
  }
  return dense().trace();
}

double Block::frobenius_norm_squared() const {
  double s = 0.0;
  for_each_entry([&](std::size_t, std::size_t, const Complex& v) { s += std::norm(v); });
  return s;
}

double Block::hermitian_defect() const {
  if (rows() != cols()) throw Error("hermitian_defect: block is not square");
  if (is_diagonal()) {
    double m = 0.0;
    for (const auto& v : diagonal()) m = std::max(m, 2.0 * std::abs(v.imag()));
    return m;
  }
  return dense().hermitian_defect();
}

CMatrix Block::to_dense() const {
  if (!is_diagonal()) return dense();
  return CMatrix::diagonal(diagonal());
}

Block Block::compose(const Block& rhs) const {
  if (cols() != rhs.rows()) throw Error("Block::compose: inner dimensions differ");
  if (is_diagonal() && rhs.is_diagonal()) {
    std::vector<Complex> d(diagonal().size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = diagonal()[i] * rhs.diagonal()[i];
    return Block(std::move(d));
  }
  return Block(to_dense() * rhs.to_dense());
}

}  // namespace ellspec
