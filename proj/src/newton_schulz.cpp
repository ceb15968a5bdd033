#include <algorithm>
#include <cmath>
#include <cstdio>

#include "quatpinv/pinv_iter.hpp"
#include "solver_common.hpp"

namespace quatpinv {

double PenroseResiduals::max() const { return std::max({e1, e2, e3, e4}); }

double SolverReport::final_residual() const {
  return residual_history.empty() ? std::nan("") : residual_history.back().residual;
}

PenroseResiduals penrose_residuals(const QMatrix& A, const QMatrix& X) {
  if (X.rows() != A.cols() || X.cols() != A.rows())
    throw DimensionMismatch("penrose_residuals: X must be n x m for A m x n");
  const QMatrix XA = X * A;
  const QMatrix AX = A * X;
  PenroseResiduals r;
  r.e1 = fro_norm(XA * X - X);
  r.e2 = fro_norm(AX * A - A);
  r.e3 = fro_norm(adjoint(XA) - XA);
  r.e4 = fro_norm(adjoint(AX) - AX);
  return r;
}

double auto_alpha(const QMatrix& A, std::uint64_t seed) {
  const double est = op_norm_est(A, 20, seed);
  if (!(est > 0.0)) throw InvalidArgument("auto alpha undefined for a zero matrix");
  return 0.99 / (est * est);
}

Side resolve_side(const QMatrix& A, Side side) {
  if (side != Side::Auto) return side;
  return A.rows() >= A.cols() ? Side::Right : Side::Left;
}

namespace {

void validate(const SolverConfig& cfg) {
  if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0)) throw InvalidArgument("gamma must lie in (0, 1]");
  if (cfg.order < 2) throw InvalidOrder("hyperpower order must be >= 2");
  if (cfg.maxit < 0) throw InvalidArgument("maxit must be >= 0");
  if (!(cfg.tol >= 0.0)) throw InvalidArgument("tol must be >= 0");
}

// Residual matrix F = I - XA (Right) or E = I - AX (Left).
QMatrix deviation(const QMatrix& A, const QMatrix& X, Side side) {
  return side == Side::Right ? identity_minus(X * A) : identity_minus(A * X);
}

bool is_pow2(int p) { return p > 0 && (p & (p - 1)) == 0; }

// R*M or M*R depending on the side the polynomial is applied from.
QMatrix apply(const QMatrix& R, const QMatrix& M, Side side) {
  return side == Side::Right ? R * M : M * R;
}

template <typename Step>
SolverResult run_newton_schulz(const QMatrix& A, const SolverConfig& cfg,
                               const IterationObserver& obs, Step&& step) {
  validate(cfg);
  const Side side = resolve_side(A, cfg.side);
  SolverResult out;
  detail::Stopwatch clock;
  out.X = detail::initial_alpha(A, cfg) * adjoint(A);
  detail::DivergenceGuard guard;
  if (obs) obs(0, out.X);
  for (int k = 0;; ++k) {
    const QMatrix R = deviation(A, out.X, side);
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
    step(R, out.X, side);
    if (obs) obs(k + 1, out.X);
  }
  out.report.wall_time = clock.seconds();
  out.report.penrose = penrose_residuals(A, out.X);
  return out;
}

}  // namespace

NeumannResult eval_neumann_poly(const QMatrix& R, const QMatrix& X, int p, Schedule schedule, Side side) {
  if (p < 2) throw InvalidOrder("Neumann order must be >= 2");
  if (side == Side::Auto) throw InvalidArgument("eval_neumann_poly needs an explicit side");
  if (R.rows() != R.cols()) throw DimensionMismatch("Neumann residual must be square");
  if ((side == Side::Right ? X.rows() : X.cols()) != R.rows())
    throw DimensionMismatch("Neumann residual and iterate do not conform");

  NeumannResult out;
  switch (schedule) {
    case Schedule::Naive: {
      // X + (R + R^2 + ... + R^{p-1}) X
      QMatrix tail = R;
      QMatrix power = R;
      for (int i = 2; i < p; ++i) {
        power = power * R;
        ++out.square_products;
        tail += power;
      }
      out.value = X;
      out.value += apply(tail, X, side);
      ++out.apply_products;
      break;
    }
    case Schedule::BinaryPow2: {
      // prod_{j<q} (I + R^{2^j}) applied factor by factor.
      if (!is_pow2(p)) throw InvalidOrder("BinaryPow2 needs p = 2^q, got " + std::to_string(p));
      QMatrix power = R;
      out.value = X;
      for (int span = 1; span < p; span *= 2) {
        if (span > 1) {
          power = power * power;
          ++out.square_products;
        }
        out.value += apply(power, out.value, side);
        ++out.apply_products;
      }
      break;
    }
    case Schedule::PatersonStockmeyer: {
      // Blocks of `a` unit coefficients combined by Horner in R^a.
      const int a = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p - 1)))));
      const int blocks = (p + a - 1) / a;
      const Index s = R.rows();
      std::vector<QMatrix> powers{QMatrix::identity(s), R};  // R^0 .. R^a
      for (int i = 2; i <= a; ++i) {
        powers.push_back(powers.back() * R);
        ++out.square_products;
      }
      auto block_sum = [&](int len) {
        QMatrix B = powers[0];
        for (int i = 1; i < len; ++i) B += powers[static_cast<std::size_t>(i)];
        return B;
      };
      const QMatrix& shift = powers[static_cast<std::size_t>(a)];
      const int last_len = p - (blocks - 1) * a;
      QMatrix acc = block_sum(last_len);
      bool acc_is_identity = last_len == 1;
      for (int j = blocks - 2; j >= 0; --j) {
        QMatrix next = block_sum(a);
        if (acc_is_identity) {
          next += shift;
        } else {
          next += apply(shift, acc, side);
          ++out.square_products;
        }
        acc = std::move(next);
        acc_is_identity = false;
      }
      out.value = apply(acc, X, side);
      ++out.apply_products;
      break;
    }
  }
  return out;
}

SolverResult ns_damped(const QMatrix& A, const SolverConfig& cfg, const IterationObserver& obs) {
  const double gamma = cfg.gamma;
  return run_newton_schulz(A, cfg, obs, [gamma](const QMatrix& R, QMatrix& X, Side side) {
    X.add_scaled(gamma, apply(R, X, side));
  });
}

SolverResult ns_hyperpower(const QMatrix& A, const SolverConfig& cfg, const IterationObserver& obs) {
  const int p = cfg.order;
  const Schedule schedule = cfg.schedule;
  if (schedule == Schedule::BinaryPow2 && !is_pow2(p))
    throw InvalidOrder("BinaryPow2 needs p = 2^q, got " + std::to_string(p));
  return run_newton_schulz(A, cfg, obs, [p, schedule](const QMatrix& R, QMatrix& X, Side side) {
    X = eval_neumann_poly(R, X, p, schedule, side).value;
  });
}

std::string solver_csv_header() { return "method,m,n,seed,iters,wall_s,e1,e2,e3,e4,final_residual"; }

std::string solver_csv_row(const std::string& method, Index m, Index n, std::uint64_t seed,
                           const SolverReport& report) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%td,%td,%llu,%d,%.6f,%.10e,%.10e,%.10e,%.10e,%.10e",
                method.c_str(), m, n, static_cast<unsigned long long>(seed), report.iterations,
                report.wall_time, report.penrose.e1, report.penrose.e2, report.penrose.e3,
                report.penrose.e4, report.final_residual());
  return buf;
}

}  // namespace quatpinv
