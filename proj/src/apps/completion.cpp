#include "quatpinv/apps/completion.hpp"

#include <algorithm>

#include "quatpinv/apps/deblur.hpp"
#include "quatpinv/factor.hpp"
#include "quatpinv/random.hpp"

namespace quatpinv {

namespace {

QMatrix safe_pinv(const QMatrix& A, const PinvFn& pinv_fn) {
  try {
    return pinv_fn(A);
  } catch (const Error&) {
    return pinv_normal_eq(A, 1e-10);
  }
}

bool has_duplicates(std::vector<Index> idx) {
  std::sort(idx.begin(), idx.end());
  return std::adjacent_find(idx.begin(), idx.end()) != idx.end();
}

}  // namespace

QMatrix cur_reconstruct(const QMatrix& A, std::span<const Index> I, std::span<const Index> J,
                        CurMode mode, const PinvFn& pinv_fn) {
  if (I.size() != J.size()) throw DimensionMismatch("CUR needs |I| = |J|");
  const QMatrix C = select_cols(A, J);
  const QMatrix R = select_rows(A, I);
  QMatrix U;
  if (mode == CurMode::UOpt)
    U = safe_pinv(C, pinv_fn) * A * safe_pinv(R, pinv_fn);
  else
    U = safe_pinv(submatrix(A, I, J), pinv_fn);
  return C * U * R;
}

CompletionResult complete(const CompletionProblem& problem, const PinvFn& pinv_fn) {
  const QMatrix& M = problem.M;
  if (problem.mask.rows() != M.rows() || problem.mask.cols() != M.cols())
    throw DimensionMismatch("mask shape differs from data");
  if (static_cast<Index>(problem.row_idx.size()) != problem.rank ||
      static_cast<Index>(problem.col_idx.size()) != problem.rank)
    throw InvalidArgument("index lists must have rank entries");
  if (problem.iters < 1) throw InvalidArgument("iters must be >= 1");

  CompletionResult out;
  out.filled = masked(problem.mask, M);
  for (int it = 0; it < problem.iters; ++it) {
    out.X = cur_reconstruct(out.filled, problem.row_idx, problem.col_idx, problem.mode, pinv_fn);
    if (problem.smoothing_sigma) out.X = gaussian_smooth(out.X, *problem.smoothing_sigma);
    out.history.push_back(fro_norm(masked(problem.mask, out.X - M)));
    out.filled = blend(problem.mask, M, out.X);
  }
  return out;
}

std::vector<Index> sample_indices(Index n, Index r, std::uint64_t seed) {
  if (n < 1 || r < 1) throw InvalidArgument("sample_indices needs n, r >= 1");
  NormalRng rng(seed);
  auto draw = [&] {
    std::vector<Index> idx(static_cast<std::size_t>(r));
    for (auto& i : idx) i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    return idx;
  };
  std::vector<Index> idx = draw();
  if (has_duplicates(idx)) idx = draw();
  return idx;
}

CompletionProblem make_completion_problem(const QMatrix& truth, double missing, Index rank,
                                          int iters, std::uint64_t seed) {
  if (!(missing >= 0.0 && missing < 1.0)) throw InvalidArgument("missing fraction must lie in [0, 1)");
  CompletionProblem p;
  p.rank = rank;
  p.iters = iters;
  p.mask = Mask::Zero(truth.rows(), truth.cols());
  NormalRng rng(seed);
  for (Index i = 0; i < truth.rows(); ++i)
    for (Index j = 0; j < truth.cols(); ++j) p.mask(i, j) = rng.uniform() > missing ? 1 : 0;
  p.M = masked(p.mask, truth);
  p.row_idx = sample_indices(truth.rows(), rank, seed + 1);
  p.col_idx = sample_indices(truth.cols(), rank, seed + 2);
  return p;
}

QMatrix low_rank_qmat(Index m, Index n, Index r, std::uint64_t seed) {
  const QMatrix G = randn_qmat(m, r, seed);
  const QMatrix H = randn_qmat(n, r, seed + 0x9e3779b97f4a7c15ULL);
  return G * adjoint(H);
}

}  // namespace quatpinv
