#pragma once

// Seedable normal generator: std::mt19937_64 bits, 53-bit uniforms, and the
// Box-Muller transform. All three are fully specified, so draws are identical
// on every platform for a fixed seed.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "quatpinv/quaternion.hpp"

namespace quatpinv {

class NormalRng {
 public:
  explicit NormalRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1].
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection keeps the draw unbiased; engine output is platform independent.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  Quat quaternion() {
    const double a = normal();
    const double b = normal();
    const double c = normal();
    const double d = normal();
    return {a, b, c, d};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace quatpinv
