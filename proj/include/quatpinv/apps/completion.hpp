#pragma once

// CUR impute-reconstruct completion of partially observed quaternion matrices.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "quatpinv/qmatrix.hpp"

namespace quatpinv {

/// Any pseudoinverse routine: an iterative solver or a direct baseline.
using PinvFn = std::function<QMatrix(const QMatrix&)>;

enum class CurMode {
  UOpt,   // U = C^+ A R^+
  WPinv,  // U = W^+, W = A[I, J]
};

/// C U R with C = A[:, J], R = A[I, :]. A pinv_fn failure on a degenerate
/// factor falls back to the ridge 1e-10 normal-equation pseudoinverse.
QMatrix cur_reconstruct(const QMatrix& A, std::span<const Index> I, std::span<const Index> J,
                        CurMode mode, const PinvFn& pinv_fn);

struct CompletionProblem {
  QMatrix M;  // observed data, unobserved entries zero
  Mask mask;  // 1 = observed
  Index rank = 5;
  int iters = 25;
  std::vector<Index> row_idx;  // I, |I| = rank
  std::vector<Index> col_idx;  // J, |J| = rank
  std::optional<double> smoothing_sigma;
  CurMode mode = CurMode::UOpt;
};

struct CompletionResult {
  QMatrix X;                    // last low-rank reconstruction
  QMatrix filled;               // mask .* M + (1 - mask) .* X
  std::vector<double> history;  // ||mask .* (X - M)||_F per round
};

/// Iterates X <- CUR(C), C <- mask .* M + (1 - mask) .* X, starting from C = M.
CompletionResult complete(const CompletionProblem& problem, const PinvFn& pinv_fn);

/// r indices drawn uniformly with replacement from [0, n). A draw with
/// duplicates is redrawn once; a second duplicate draw is kept.
std::vector<Index> sample_indices(Index n, Index r, std::uint64_t seed);

/// Masks `truth` with the given missing fraction and samples I, J.
CompletionProblem make_completion_problem(const QMatrix& truth, double missing, Index rank,
                                          int iters, std::uint64_t seed);

/// Exact rank-r test matrix G H^H with Gaussian G (m x r) and H (n x r).
QMatrix low_rank_qmat(Index m, Index n, Index r, std::uint64_t seed);

}  // namespace quatpinv
