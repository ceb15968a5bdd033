#include <algorithm>
#include <cmath>

#include "quatpinv/factor.hpp"
#include "quatpinv/pinv_iter.hpp"
#include "solver_common.hpp"

namespace quatpinv {

namespace {

// M = Q K Q^H + c (I - Q Q^H) for the thin sketch Y = Q R, with K = (R R^H)^{-1}
// and c = ||K||_2. M agrees with (Y Y^H)^+ on range(Y) and maps range(Y)'s
// complement to itself, so iterates keep their row (column) space.
QMatrix sketch_preconditioner(const QMatrix& Y) {
  const QRFactors qr = thin_qr(Y);
  const QMatrix Rinv = solve_upper(qr.R, QMatrix::identity(qr.R.rows()));
  const QMatrix K = Rinv * adjoint(Rinv);
  const Eigen::VectorXd s = qsvd(qr.R).S;
  const double smin = s(s.size() - 1);
  const double c = 1.0 / (smin * smin);
  const QMatrix QH = adjoint(qr.Q);
  QMatrix M = qr.Q * K * QH;
  M.add_scaled(-c, qr.Q * QH);
  M.add_identity(c);
  return M;
}

}  // namespace

SolverResult cgne_q(const QMatrix& A, const SolverConfig& cfg, const std::optional<SketchConfig>& precond,
                    const IterationObserver& obs) {
  if (cfg.maxit < 0) throw InvalidArgument("maxit must be >= 0");
  if (!(cfg.tol >= 0.0)) throw InvalidArgument("tol must be >= 0");
  const bool column = resolve_side(A, cfg.side) == Side::Right;
  const QMatrix AH = adjoint(A);

  SolverResult out;
  detail::Stopwatch clock;
  std::optional<QMatrix> M;
  if (precond) {
    if (precond->block_r < 1 || precond->block_r > std::min(A.rows(), A.cols()))
      throw InvalidArgument("block_r must lie in [1, min(m, n)]");
    NormalRng rng(precond->seed);
    if (column)
      M = sketch_preconditioner(A * detail::random_block(rng, A.cols(), precond->block_r));
    else
      M = sketch_preconditioner(AH * detail::random_block(rng, A.rows(), precond->block_r));
  }

  // Column form: R = I - XA, Z = R A^H, W = D A, preconditioned Z M.
  // Row form:    R = I - AX, Z = A^H R, W = A D, preconditioned M Z.
  auto residual = [&](const QMatrix& X) { return column ? identity_minus(X * A) : identity_minus(A * X); };
  auto gradient = [&](const QMatrix& R) { return column ? R * AH : AH * R; };
  auto image = [&](const QMatrix& D) { return column ? D * A : A * D; };
  auto precondition = [&](const QMatrix& Z) { return !M ? Z : column ? Z * *M : *M * Z; };

  out.X = detail::initial_alpha(A, cfg) * AH;
  if (obs) obs(0, out.X);
  QMatrix R = residual(out.X);
  QMatrix Z = gradient(R);
  QMatrix Zt = precondition(Z);
  QMatrix D = Zt;
  double rho = real_inner(Z, Zt);
  detail::DivergenceGuard guard;
  for (int k = 0;; ++k) {
    const double res = fro_norm(R);
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
    if (!(rho > 0.0)) throw Breakdown("gradient vanished above tolerance at iteration " + std::to_string(k));
    const QMatrix W = image(D);
    const double w2 = fro_norm2(W);
    if (w2 == 0.0) throw Breakdown("search direction image vanished at iteration " + std::to_string(k));
    const double step = rho / w2;
    out.X.add_scaled(step, D);
    R = residual(out.X);
    Z = gradient(R);
    Zt = precondition(Z);
    const double rho_next = real_inner(Z, Zt);
    const double beta = rho_next / rho;
    rho = rho_next;
    D *= beta;
    D += Zt;
    if (obs) obs(k + 1, out.X);
  }
  out.report.wall_time = clock.seconds();
  out.report.penrose = penrose_residuals(A, out.X);
  return out;
}

}  // namespace quatpinv
