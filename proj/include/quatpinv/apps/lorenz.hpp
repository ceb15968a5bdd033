#pragma once

// Identification of a right quaternion filter between a delayed, noisy copy of
// a Lorenz trajectory and the trajectory itself.

#include <array>
#include <cstdint>
#include <vector>

#include "quatpinv/pinv_iter.hpp"

namespace quatpinv {

struct LorenzParams {
  double sigma = 10.0;
  double beta = 8.0 / 3.0;
  double rho = 28.0;
};

using LorenzState = std::array<double, 3>;

/// Fixed-step classical RK4; returns steps + 1 states starting at x0.
std::vector<LorenzState> lorenz_rk4(const LorenzParams& params, const LorenzState& x0, double dt,
                                    int steps);

struct LorenzProblem {
  int N = 50;            // filter taps and equations
  double T_end = 10.0;   // the N filter samples span [0, T_end]
  LorenzParams params;
  LorenzState initial{1.0, 1.0, 1.0};
  double noise_level = 0.01;  // noise std as a fraction of each channel's std
  int delay = 1;              // input lag in samples
  std::uint64_t seed = 0;
};

struct LorenzSystem {
  QMatrix X;       // N x N, X[p, q] = x[N + p - q]
  QMatrix Y;       // N x 1, Y[p] = y[N + p]
  QMatrix input;   // 2N x 1 pure quaternion samples x[k]
  QMatrix target;  // 2N x 1 pure quaternion samples y[k]
  double dt = 0;
};

/// Integrates 2N samples at dt = T_end / (N - 1). RK4 runs with substeps of at
/// most 0.01 s so the trajectory does not depend on the sampling rate.
LorenzSystem lorenz_build(const LorenzProblem& problem);

struct LorenzSolution {
  QMatrix w;  // N x 1 taps
  SolverReport report;  // residual_history holds RelRes = ||X w - Y|| / ||Y||
};

/// Square Newton-Schulz X_{k+1} = X_k (2I - X X_k) from X_0 = alpha X^H; a
/// damped step X_k (I + gamma E_k) is used while the estimate of ||E_k||_2 is
/// at least 1. Stops on RelRes <= tol or after maxit updates.
LorenzSolution lorenz_solve_ns(const QMatrix& X, const QMatrix& Y, double tol, int maxit,
                               double gamma = 0.5, const IterationObserver& obs = {});

}  // namespace quatpinv
