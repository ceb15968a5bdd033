#include "quatpinv/apps/lorenz.hpp"

#include <cmath>

#include "quatpinv/random.hpp"
#include "../solver_common.hpp"

namespace quatpinv {

namespace {

LorenzState field(const LorenzParams& p, const LorenzState& s) {
  return {p.sigma * (s[1] - s[0]), s[0] * (p.rho - s[2]) - s[1], s[0] * s[1] - p.beta * s[2]};
}

LorenzState axpy(const LorenzState& x, double h, const LorenzState& k) {
  return {x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2]};
}

LorenzState rk4_step(const LorenzParams& p, const LorenzState& x, double dt) {
  const LorenzState k1 = field(p, x);
  const LorenzState k2 = field(p, axpy(x, dt / 2, k1));
  const LorenzState k3 = field(p, axpy(x, dt / 2, k2));
  const LorenzState k4 = field(p, axpy(x, dt, k3));
  LorenzState out;
  for (int c = 0; c < 3; ++c) out[c] = x[c] + dt / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
  return out;
}

}  // namespace

std::vector<LorenzState> lorenz_rk4(const LorenzParams& params, const LorenzState& x0, double dt,
                                    int steps) {
  if (!(dt > 0.0) || steps < 0) throw InvalidArgument("lorenz_rk4 needs dt > 0 and steps >= 0");
  std::vector<LorenzState> out{x0};
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int s = 0; s < steps; ++s) out.push_back(rk4_step(params, out.back(), dt));
  return out;
}

LorenzSystem lorenz_build(const LorenzProblem& problem) {
  const int N = problem.N;
  if (N < 2) throw InvalidArgument("Lorenz system size must be >= 2");
  if (!(problem.T_end > 0.0)) throw InvalidArgument("T_end must be > 0");
  if (problem.delay < 0 || problem.delay >= N) throw InvalidArgument("delay must lie in [0, N)");
  if (!(problem.noise_level >= 0.0)) throw InvalidArgument("noise_level must be >= 0");

  LorenzSystem sys;
  sys.dt = problem.T_end / (N - 1);
  const int substeps = std::max(1, static_cast<int>(std::ceil(sys.dt / 0.01)));
  const Index samples = 2 * static_cast<Index>(N);

  sys.target = QMatrix(samples, 1);
  LorenzState state = problem.initial;
  for (Index k = 0; k < samples; ++k) {
    sys.target(k, 0) = Quat(0.0, state[0], state[1], state[2]);
    for (int s = 0; s < substeps; ++s) state = rk4_step(problem.params, state, sys.dt / substeps);
  }

  auto channel = [](const Quat& q, int c) { return c == 0 ? q.b : c == 1 ? q.c : q.d; };
  std::array<double, 3> stddev{};
  for (int c = 0; c < 3; ++c) {
    double mean = 0, sq = 0;
    for (Index k = 0; k < samples; ++k) mean += channel(sys.target(k, 0), c);
    mean /= static_cast<double>(samples);
    for (Index k = 0; k < samples; ++k) {
      const double d = channel(sys.target(k, 0), c) - mean;
      sq += d * d;
    }
    stddev[c] = std::sqrt(sq / static_cast<double>(samples));
  }

  NormalRng rng(problem.seed);
  sys.input = QMatrix(samples, 1);
  for (Index k = 0; k < samples; ++k) {
    const Index src = std::max<Index>(0, k - problem.delay);
    Quat q = sys.target(src, 0);
    q.b += problem.noise_level * stddev[0] * rng.normal();
    q.c += problem.noise_level * stddev[1] * rng.normal();
    q.d += problem.noise_level * stddev[2] * rng.normal();
    sys.input(k, 0) = q;
  }

  sys.X = QMatrix(N, N);
  sys.Y = QMatrix(N, 1);
  for (Index p = 0; p < N; ++p) {
    for (Index q = 0; q < N; ++q) sys.X(p, q) = sys.input(N + p - q, 0);
    sys.Y(p, 0) = sys.target(N + p, 0);
  }
  return sys;
}

LorenzSolution lorenz_solve_ns(const QMatrix& X, const QMatrix& Y, double tol, int maxit, double gamma,
                               const IterationObserver& obs) {
  if (X.rows() != X.cols()) throw DimensionMismatch("Lorenz system matrix must be square");
  if (Y.rows() != X.rows() || Y.cols() != 1) throw DimensionMismatch("target must be N x 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in (0, 1)");
  if (maxit < 0) throw InvalidArgument("maxit must be >= 0");
  const double ynorm = fro_norm(Y);
  if (ynorm == 0.0) throw InvalidArgument("target is zero");

  LorenzSolution out;
  detail::Stopwatch clock;
  QMatrix Xk = auto_alpha(X) * adjoint(X);
  detail::DivergenceGuard guard;
  bool contracting = false;
  if (obs) obs(0, Xk);
  for (int k = 0;; ++k) {
    out.w = Xk * Y;
    const double relres = fro_norm(X * out.w - Y) / ynorm;
    detail::record(out.report, k, relres);
    guard.observe(relres);
    if (relres <= tol) {
      out.report.converged = true;
      out.report.iterations = k;
      break;
    }
    if (k == maxit) {
      out.report.iterations = k;
      break;
    }
    const QMatrix E = identity_minus(X * Xk);
    if (!contracting) contracting = op_norm_est(E, 20, static_cast<std::uint64_t>(k)) < 1.0;
    Xk.add_scaled(contracting ? 1.0 : gamma, Xk * E);
    if (obs) obs(k + 1, Xk);
  }
  out.report.wall_time = clock.seconds();
  return out;
}

}  // namespace quatpinv
