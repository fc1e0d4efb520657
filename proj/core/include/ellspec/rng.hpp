#pragma once

#include <cstdint>

#include "ellspec/matrix.hpp"

namespace ellspec {

/// 64-bit linear congruential generator used for every seeded test object.
///
///   state <- 6364136223846793005 * state + 1442695040888963407  (mod 2^64)
///   uniform() = (state >> 11) * 2^-53   (state advanced first)
class Lcg {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg(std::uint64_t seed = 42) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ = kMultiplier * state_ + kIncrement;
    return state_;
  }

  /// Uniform in [0, 1).
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [-1, 1).
  double symmetric() noexcept { return 2.0 * uniform() - 1.0; }

  /// Real and imaginary parts independently uniform in [-1, 1).
  Complex complex() noexcept {
    const double re = symmetric();
    const double im = symmetric();
    return {re, im};
  }

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace ellspec
