#pragma once

// Direct factorizations: thin QR, Hermitian positive definite solves, the
// quaternion SVD through the complex adjoint embedding, and the two direct
// pseudoinverse routes (SVD based and normal equations). The iterative
// solvers are checked against these.

#include <Eigen/Core>

#include "quatpinv/qmatrix.hpp"

namespace quatpinv {

struct QRFactors {
  QMatrix Q;  // m x r, Q^H Q = I
  QMatrix R;  // r x r, upper triangular, real positive diagonal
};

/// Householder thin QR of a tall Y (m >= r). Throws RankDeficient when the
/// smallest |R_ii| is at or below 1e-12 * ||Y||_F.
QRFactors thin_qr(const QMatrix& Y);

/// Solves R Z = B for upper triangular R by back substitution.
QMatrix solve_upper(const QMatrix& R, const QMatrix& B);

/// Y^+ = R^{-1} Q^H from the thin QR of a tall, full column rank Y.
QMatrix pinv_thin_qr(const QMatrix& Y);

/// Y^+ = (Y^H Y + ridge I)^{-1} Y^H through hpd_solve.
QMatrix pinv_gram(const QMatrix& Y, double ridge = 1e-10);

enum class HpdPath { Cholesky, ConjugateGradient, NewtonSchulz };

/// Solves (G + ridge I) Z = B for Hermitian positive definite G.
///
/// Cholesky first; when a pivot is not numerically positive, a matrix CG
/// (capped at 4r iterations), then Newton-Schulz on G^{-1}. Throws
/// NotHermitian when ||G - G^H||_F > 1e-10 ||G||_F and Indefinite when no
/// route reaches ||(G + ridge I) Z - B||_F <= 1e-10 ||B||_F.
QMatrix hpd_solve(const QMatrix& G, const QMatrix& B, double ridge = 1e-10,
                  HpdPath* used = nullptr);

/// SVD of a complex matrix by one-sided (Hestenes) Jacobi.
struct ComplexSvd {
  ComplexMatrix U;    // rows x k
  Eigen::VectorXd S;  // k = min(rows, cols), descending
  ComplexMatrix V;    // cols x k
  int sweeps = 0;
};

/// Throws ConvergenceFailure after 60 sweeps without convergence.
ComplexSvd jacobi_svd(const ComplexMatrix& C);

struct QSVDFactors {
  QMatrix U;          // m x m unitary
  Eigen::VectorXd S;  // min(m, n), nonincreasing, nonnegative
  QMatrix V;          // n x n unitary
};

/// Quaternion SVD A = U diag(S) V^H computed on the complex adjoint embedding.
QSVDFactors qsvd(const QMatrix& A);

/// V S^+ U^H, treating sigma <= rank_tol * max(sigma) as zero.
QMatrix pinv_qsvd(const QMatrix& A, double rank_tol = 1e-10);

/// (A^H A)^{-1} A^H for m >= n, A^H (A A^H)^{-1} otherwise.
QMatrix pinv_normal_eq(const QMatrix& A, double ridge = 0.0);

}  // namespace quatpinv
