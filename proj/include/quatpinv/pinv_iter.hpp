#pragma once

// Iterative Moore-Penrose pseudoinverse solvers for quaternion matrices.
//
// Side convention: for full column rank A (m >= n) the solvers drive the right
// deviation F = I_n - X A to zero; for full row rank A (m < n) they drive the
// left deviation E = I_m - A X to zero. Either way the limit is A^+.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "quatpinv/qmatrix.hpp"

namespace quatpinv {

enum class Side {
  Auto,   // Right when m >= n, Left otherwise
  Left,   // full row rank: X_{k+1} = X_k S(E_k)
  Right,  // full column rank: X_{k+1} = S(F_k) X_k
};

/// How the truncated Neumann polynomial sum_{i<p} R^i is applied.
enum class Schedule { Naive, BinaryPow2, PatersonStockmeyer };

struct SolverConfig {
  std::optional<double> alpha;  // X_0 = alpha A^H; empty selects auto_alpha
  double gamma = 1.0;           // damping, 0 < gamma <= 1
  int order = 2;                // hyperpower order p >= 2
  Schedule schedule = Schedule::Naive;
  double tol = 1e-8;
  int maxit = 100;
  Side side = Side::Auto;
  std::uint64_t seed = 0;  // power-method start vector for auto_alpha
};

enum class SketchPinvPath { ThinQr, Gram };

struct SketchConfig {
  Index block_r = 8;   // sketch width r
  Index test_s = 8;    // test sketch width s
  int cycle_T = 5;     // randomized steps per hybrid cycle
  std::uint64_t seed = 0;
  double relaxation = 1.0;  // in (0, 2)
  SketchPinvPath path = SketchPinvPath::ThinQr;
};

struct PenroseResiduals {
  double e1 = 0, e2 = 0, e3 = 0, e4 = 0;
  double max() const;
};

struct ResidualSample {
  int iter;
  double residual;
};

struct SolverReport {
  int iterations = 0;
  std::vector<ResidualSample> residual_history;
  double wall_time = 0.0;  // seconds, solver loop only
  PenroseResiduals penrose;
  bool converged = false;

  double final_residual() const;
};

struct SolverResult {
  QMatrix X;
  SolverReport report;
};

/// Called with (k, X_k) for the initial iterate and after every update.
using IterationObserver = std::function<void(int, const QMatrix&)>;

/// e1 = ||XAX - X||, e2 = ||AXA - A||, e3 = ||(XA)^H - XA||, e4 = ||(AX)^H - AX||.
PenroseResiduals penrose_residuals(const QMatrix& A, const QMatrix& X);

/// 0.99 / est(||A||_2)^2 from a 20-step power method; inside (0, 2/||A||_2^2).
double auto_alpha(const QMatrix& A, std::uint64_t seed = 0);

Side resolve_side(const QMatrix& A, Side side);

/// Damped Newton-Schulz: X <- X + gamma F X (right) or X + gamma X E (left).
/// Throws Divergence when the residual stays >= 10x its initial value for 5
/// consecutive iterations.
SolverResult ns_damped(const QMatrix& A, const SolverConfig& cfg, const IterationObserver& obs = {});

/// Order-p hyperpower iteration; residual recurrence R_{k+1} = R_k^p.
SolverResult ns_hyperpower(const QMatrix& A, const SolverConfig& cfg,
                           const IterationObserver& obs = {});

struct NeumannResult {
  QMatrix value;
  int square_products = 0;  // s x s times s x s
  int apply_products = 0;   // s x s times the iterate
};

/// (sum_{i<p} R^i) X for Side::Right, X (sum_{i<p} R^i) for Side::Left.
/// Throws InvalidOrder for p < 2, or BinaryPow2 with p not a power of two.
NeumannResult eval_neumann_poly(const QMatrix& R, const QMatrix& X, int p, Schedule schedule,
                                Side side = Side::Right);

/// One column sketch-and-project step onto {X : X (A Omega) = Omega}.
QMatrix sketch_project_column(const QMatrix& A, const QMatrix& X, const QMatrix& Omega,
                              double relaxation = 1.0,
                              SketchPinvPath path = SketchPinvPath::ThinQr);

/// One row sketch-and-project step onto {X : S^H A X = S^H}.
QMatrix sketch_project_row(const QMatrix& A, const QMatrix& X, const QMatrix& S,
                           double relaxation = 1.0);

/// Randomized sketch-and-project for full column rank A, stopped on the
/// test-sketch estimate ||Pi - X (A Pi)||_F / ||Pi||_F <= tol.
SolverResult rsp_column(const QMatrix& A, const SolverConfig& cfg, const SketchConfig& sk,
                        const IterationObserver& obs = {});

/// Row variant for full row rank A; starts from X_0 = 0.
SolverResult rsp_row(const QMatrix& A, const SolverConfig& cfg, const SketchConfig& sk,
                     const IterationObserver& obs = {});

/// T randomized steps, then one exact order-p hyperpower correction
/// (Paterson-Stockmeyer), repeated. Column case only. One iteration = one cycle.
SolverResult hybrid_rsp_ns(const QMatrix& A, const SolverConfig& cfg, const SketchConfig& sk,
                           const IterationObserver& obs = {});

/// Matrix CG on f(X) = 1/2 ||XA - I||_F^2 (row analogue when m < n), with an
/// optional thin-sketch preconditioner. Throws Breakdown on ||W_k||_F = 0.
SolverResult cgne_q(const QMatrix& A, const SolverConfig& cfg,
                    const std::optional<SketchConfig>& precond = std::nullopt,
                    const IterationObserver& obs = {});

struct RateEstimate {
  double mean = 0;       // empirical E ||X_1 - A^+||^2 / ||X_0 - A^+||^2
  double std_error = 0;
  double bound = 0;      // 1 - r sigma_min^2 / ||A||_F^2
  int trials = 0;
};

/// Monte Carlo one-step contraction of rsp_column against its expected rate.
RateEstimate rsp_rate_check(const QMatrix& A, const SketchConfig& sk, int trials);

/// "method,m,n,seed,iters,wall_s,e1,e2,e3,e4,final_residual"
std::string solver_csv_header();
std::string solver_csv_row(const std::string& method, Index m, Index n, std::uint64_t seed,
                           const SolverReport& report);

}  // namespace quatpinv
