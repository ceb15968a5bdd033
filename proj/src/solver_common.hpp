#pragma once

#include <chrono>
#include <cmath>

#include "quatpinv/pinv_iter.hpp"
#include "quatpinv/random.hpp"

namespace quatpinv::detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Residual >= 10x the initial one for 5 consecutive iterations, or non-finite.
class DivergenceGuard {
 public:
  void observe(double residual) {
    if (!std::isfinite(residual)) throw Divergence("residual is not finite");
    if (first_ < 0) {
      first_ = residual;
      return;
    }
    streak_ = residual >= 10.0 * first_ ? streak_ + 1 : 0;
    if (streak_ >= 5)
      throw Divergence("residual grew 10x over its initial value for 5 iterations; alpha invalid?");
  }

 private:
  double first_ = -1.0;
  int streak_ = 0;
};

inline double initial_alpha(const QMatrix& A, const SolverConfig& cfg) {
  return cfg.alpha ? *cfg.alpha : auto_alpha(A, cfg.seed);
}

inline QMatrix random_block(NormalRng& rng, Index rows, Index cols) {
  QMatrix B(rows, cols);
  for (auto& q : B.data()) q = rng.quaternion();
  return B;
}

inline void record(SolverReport& rep, int k, double residual) {
  rep.residual_history.push_back({k, residual});
}

}  // namespace quatpinv::detail
