#include <algorithm>
#include <cmath>

#include "quatpinv/factor.hpp"
#include "quatpinv/pinv_iter.hpp"
#include "solver_common.hpp"

namespace quatpinv {

namespace {

constexpr int kMaxRedraws = 10;

void validate(const QMatrix& A, const SolverConfig& cfg, const SketchConfig& sk) {
  if (cfg.maxit < 0) throw InvalidArgument("maxit must be >= 0");
  if (!(cfg.tol >= 0.0)) throw InvalidArgument("tol must be >= 0");
  if (sk.block_r < 1 || sk.block_r > std::min(A.rows(), A.cols()))
    throw InvalidArgument("block_r must lie in [1, min(m, n)]");
  if (sk.test_s < 1) throw InvalidArgument("test_s must be >= 1");
  if (sk.cycle_T < 0) throw InvalidArgument("cycle_T must be >= 0");
  if (!(sk.relaxation > 0.0 && sk.relaxation < 2.0))
    throw InvalidArgument("relaxation must lie in (0, 2)");
}

// Draws a fresh sketch until `step` accepts it.
template <typename Step>
QMatrix step_with_redraw(NormalRng& rng, Index rows, Index cols, Step&& step) {
  for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
    const QMatrix sketch = detail::random_block(rng, rows, cols);
    try {
      return step(sketch);
    } catch (const RankDeficient&) {
    } catch (const Indefinite&) {
    }
  }
  throw SketchFailure("sketch stayed rank deficient after " + std::to_string(kMaxRedraws) +
                      " redraws");
}

// Shared loop for the column solvers. `cycle` advances X by one iteration.
template <typename Cycle>
SolverResult run_column(const QMatrix& A, const SolverConfig& cfg, const SketchConfig& sk,
                        const IterationObserver& obs, Cycle&& cycle) {
  validate(A, cfg, sk);
  if (A.rows() < A.cols()) throw DimensionMismatch("column solver needs m >= n");
  SolverResult out;
  NormalRng rng(sk.seed);
  detail::Stopwatch clock;
  const QMatrix Pi = detail::random_block(rng, A.cols(), sk.test_s);
  const QMatrix APi = A * Pi;
  const double pi_norm = fro_norm(Pi);
  out.X = detail::initial_alpha(A, cfg) * adjoint(A);
  detail::DivergenceGuard guard;
  if (obs) obs(0, out.X);
  for (int k = 0;; ++k) {
    const double res = fro_norm(Pi - out.X * APi) / pi_norm;
    detail::record(out.report, k, res);
    guard.observe(res);
    if (res <= cfg.tol) {
      out.report.converged = true;
      out.report.iterations = k;
      break;
    }
    if (k == cfg.maxit) {
      out.report.iterations = k;
      break;
    }
    cycle(rng, out.X);
    if (obs) obs(k + 1, out.X);
  }
  out.report.wall_time = clock.seconds();
  out.report.penrose = penrose_residuals(A, out.X);
  return out;
}

}  // namespace

QMatrix sketch_project_column(const QMatrix& A, const QMatrix& X, const QMatrix& Omega,
                              double relaxation, SketchPinvPath path) {
  if (Omega.rows() != A.cols() || X.rows() != A.cols() || X.cols() != A.rows())
    throw DimensionMismatch("sketch_project_column shapes");
  const QMatrix Y = A * Omega;
  const QMatrix Ydag = path == SketchPinvPath::ThinQr ? pinv_thin_qr(Y) : pinv_gram(Y);
  QMatrix next = X;
  next.add_scaled(relaxation, (Omega - X * Y) * Ydag);
  return next;
}

QMatrix sketch_project_row(const QMatrix& A, const QMatrix& X, const QMatrix& S, double relaxation) {
  if (S.rows() != A.rows() || X.rows() != A.cols() || X.cols() != A.rows())
    throw DimensionMismatch("sketch_project_row shapes");
  const QMatrix SH = adjoint(S);
  const QMatrix Z = SH * A;
  const QMatrix W = hpd_solve(Z * adjoint(Z), SH - Z * X);
  QMatrix next = X;
  next.add_scaled(relaxation, adjoint(Z) * W);
  return next;
}

SolverResult rsp_column(const QMatrix& A, const SolverConfig& cfg, const SketchConfig& sk,
                        const IterationObserver& obs) {
  return run_column(A, cfg, sk, obs, [&](NormalRng& rng, QMatrix& X) {
    X = step_with_redraw(rng, A.cols(), sk.block_r, [&](const QMatrix& Omega) {
      return sketch_project_column(A, X, Omega, sk.relaxation, sk.path);
    });
  });
}

SolverResult hybrid_rsp_ns(const QMatrix& A, const SolverConfig& cfg, const SketchConfig& sk,
                           const IterationObserver& obs) {
  if (cfg.order < 2) throw InvalidOrder("hyperpower order must be >= 2");
  return run_column(A, cfg, sk, obs, [&](NormalRng& rng, QMatrix& X) {
    for (int t = 0; t < sk.cycle_T; ++t) {
      X = step_with_redraw(rng, A.cols(), sk.block_r, [&](const QMatrix& Omega) {
        return sketch_project_column(A, X, Omega, sk.relaxation, sk.path);
      });
    }
    const QMatrix F = identity_minus(X * A);
    X = eval_neumann_poly(F, X, cfg.order, Schedule::PatersonStockmeyer, Side::Right).value;
  });
}

SolverResult rsp_row(const QMatrix& A, const SolverConfig& cfg, const SketchConfig& sk,
                     const IterationObserver& obs) {
  validate(A, cfg, sk);
  if (A.rows() > A.cols()) throw DimensionMismatch("rsp_row needs m <= n");
  SolverResult out;
  NormalRng rng(sk.seed);
  detail::Stopwatch clock;
  const QMatrix Pi = detail::random_block(rng, A.rows(), sk.test_s);
  const QMatrix PiH = adjoint(Pi);
  const QMatrix PiHA = PiH * A;
  const double pi_norm = fro_norm(Pi);
  out.X = QMatrix(A.cols(), A.rows());
  detail::DivergenceGuard guard;
  if (obs) obs(0, out.X);
  for (int k = 0;; ++k) {
    const double res = fro_norm(PiH - PiHA * out.X) / pi_norm;
    detail::record(out.report, k, res);
    guard.observe(res);
    if (res <= cfg.tol) {
      out.report.converged = true;
      out.report.iterations = k;
      break;
    }
    if (k == cfg.maxit) {
      out.report.iterations = k;
      break;
    }
    out.X = step_with_redraw(rng, A.rows(), sk.block_r, [&](const QMatrix& S) {
      return sketch_project_row(A, out.X, S, sk.relaxation);
    });
    if (obs) obs(k + 1, out.X);
  }
  out.report.wall_time = clock.seconds();
  out.report.penrose = penrose_residuals(A, out.X);
  return out;
}

RateEstimate rsp_rate_check(const QMatrix& A, const SketchConfig& sk, int trials) {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (A.rows() < A.cols()) throw DimensionMismatch("rate check needs m >= n");
  if (sk.block_r < 1 || sk.block_r > A.cols()) throw InvalidArgument("block_r must lie in [1, n]");
  const QSVDFactors f = qsvd(A);
  const double smin = f.S(f.S.size() - 1);
  const QMatrix Xstar = pinv_qsvd(A);
  const QMatrix X0 = auto_alpha(A, sk.seed) * adjoint(A);
  const double e0 = fro_norm2(X0 - Xstar);

  NormalRng rng(sk.seed);
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    const QMatrix X1 = step_with_redraw(rng, A.cols(), sk.block_r, [&](const QMatrix& Omega) {
      return sketch_project_column(A, X0, Omega, 1.0, sk.path);
    });
    ratios.push_back(fro_norm2(X1 - Xstar) / e0);
  }
  RateEstimate est;
  est.trials = trials;
  for (double r : ratios) est.mean += r;
  est.mean /= trials;
  if (trials > 1) {
    double var = 0;
    for (double r : ratios) var += (r - est.mean) * (r - est.mean);
    est.std_error = std::sqrt(var / (trials - 1) / trials);
  }
  est.bound = 1.0 - static_cast<double>(sk.block_r) * smin * smin / fro_norm2(A);
  return est;
}

}  // namespace quatpinv
