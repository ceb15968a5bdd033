#include "quatpinv/factor.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

namespace quatpinv {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// y <- y - tau * v * (v^H y) on rows [offset, offset + v.size()) of column j.
void apply_reflector(QMatrix& W, Index offset, const std::vector<Quat>& v, double tau, Index j) {
  Quat s;
  for (std::size_t i = 0; i < v.size(); ++i) s += conj(v[i]) * W(offset + static_cast<Index>(i), j);
  s *= tau;
  for (std::size_t i = 0; i < v.size(); ++i) W(offset + static_cast<Index>(i), j) -= v[i] * s;
}

// Quaternion vector whose complex embedding has vc as its first column.
std::vector<Quat> quaternion_from_embedded(const Eigen::VectorXcd& vc) {
  std::vector<Quat> x(static_cast<std::size_t>(vc.size() / 2));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto z1 = vc(static_cast<Index>(2 * i));
    const auto w = vc(static_cast<Index>(2 * i + 1));  // -conj(z2)
    x[i] = Quat(z1.real(), z1.imag(), -w.real(), w.imag());
  }
  return x;
}

double vec_norm(const std::vector<Quat>& x) {
  double s = 0;
  for (const auto& q : x) s += norm2(q);
  return std::sqrt(s);
}

// Orthogonalizes x against the accepted columns of B (two passes) and appends
// it, normalized, when the remainder keeps at least `keep` of its norm.
bool accept_orthogonal(QMatrix& B, Index& count, std::vector<Quat> x, double keep) {
  const double n0 = vec_norm(x);
  if (n0 == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass) {
    for (Index c = 0; c < count; ++c) {
      Quat h;  // b_c^H x
      for (Index i = 0; i < B.rows(); ++i) h += conj(B(i, c)) * x[static_cast<std::size_t>(i)];
      for (Index i = 0; i < B.rows(); ++i) x[static_cast<std::size_t>(i)] -= B(i, c) * h;
    }
  }
  const double n1 = vec_norm(x);
  if (n1 <= keep * n0) return false;
  for (Index i = 0; i < B.rows(); ++i) B(i, count) = x[static_cast<std::size_t>(i)] / n1;
  ++count;
  return true;
}

// Fills the remaining columns of B with standard basis directions made orthogonal.
void complete_unitary(QMatrix& B, Index& count) {
  for (Index e = 0; e < B.rows() && count < B.cols(); ++e) {
    std::vector<Quat> x(static_cast<std::size_t>(B.rows()));
    x[static_cast<std::size_t>(e)] = Quat(1.0);
    accept_orthogonal(B, count, std::move(x), 0.1);
  }
  if (count < B.cols()) throw ConvergenceFailure("could not complete a unitary basis");
}

QMatrix cholesky_solve(const QMatrix& L, const QMatrix& B) {
  const Index n = L.rows();
  QMatrix Y = B;
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < i; ++k) {
      const Quat l = L(i, k);
      for (Index c = 0; c < B.cols(); ++c) Y(i, c) -= l * Y(k, c);
    }
    const double d = 1.0 / L(i, i).a;
    for (Index c = 0; c < B.cols(); ++c) Y(i, c) *= d;
  }
  for (Index i = n - 1; i >= 0; --i) {
    for (Index k = i + 1; k < n; ++k) {
      const Quat l = conj(L(k, i));
      for (Index c = 0; c < B.cols(); ++c) Y(i, c) -= l * Y(k, c);
    }
    const double d = 1.0 / L(i, i).a;
    for (Index c = 0; c < B.cols(); ++c) Y(i, c) *= d;
  }
  return Y;
}

// Lower-triangular L with G = L L^H, or false when a pivot is not
// numerically positive.
bool cholesky(const QMatrix& G, QMatrix& L) {
  const Index n = G.rows();
  double max_diag = 0.0;
  for (Index i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(G(i, i).a));
  const double floor = static_cast<double>(std::max<Index>(n, 1)) * kEps * max_diag;
  L = QMatrix(n, n);
  for (Index j = 0; j < n; ++j) {
    double pivot = G(j, j).a;
    for (Index k = 0; k < j; ++k) pivot -= norm2(L(j, k));
    if (!(pivot > floor)) return false;
    const double ljj = std::sqrt(pivot);
    L(j, j) = Quat(ljj);
    for (Index i = j + 1; i < n; ++i) {
      Quat s = G(i, j);
      for (Index k = 0; k < j; ++k) s -= L(i, k) * conj(L(j, k));
      L(i, j) = s / ljj;
    }
  }
  return true;
}

QMatrix shifted(const QMatrix& G, double ridge) {
  QMatrix Gs = G;
  return Gs.add_identity(ridge);
}

}  // namespace

QRFactors thin_qr(const QMatrix& Y) {
  const Index m = Y.rows();
  const Index r = Y.cols();
  if (m < r) throw DimensionMismatch("thin_qr needs rows >= cols");
  QMatrix W = Y;
  std::vector<std::vector<Quat>> reflectors(static_cast<std::size_t>(r));
  std::vector<double> taus(static_cast<std::size_t>(r), 0.0);

  for (Index k = 0; k < r; ++k) {
    std::vector<Quat> v(static_cast<std::size_t>(m - k));
    for (Index i = k; i < m; ++i) v[static_cast<std::size_t>(i - k)] = W(i, k);
    const double alpha = vec_norm(v);
    if (alpha == 0.0) continue;  // caught by the diagonal test below
    const double x1 = norm(v[0]);
    const Quat u = x1 > 0.0 ? v[0] / x1 : Quat(1.0);
    v[0] += u * alpha;
    const double vv = 2.0 * (alpha * alpha + alpha * x1);
    const double tau = 2.0 / vv;
    for (Index j = k; j < r; ++j) apply_reflector(W, k, v, tau, j);
    reflectors[static_cast<std::size_t>(k)] = std::move(v);
    taus[static_cast<std::size_t>(k)] = tau;
  }

  QRFactors f{QMatrix(m, r), QMatrix(r, r)};
  for (Index i = 0; i < r; ++i)
    for (Index j = i; j < r; ++j) f.R(i, j) = W(i, j);
  for (Index i = 0; i < r; ++i) f.Q(i, i) = Quat(1.0);
  for (Index k = r - 1; k >= 0; --k) {
    const auto& v = reflectors[static_cast<std::size_t>(k)];
    if (v.empty()) continue;
    for (Index j = 0; j < r; ++j) apply_reflector(f.Q, k, v, taus[static_cast<std::size_t>(k)], j);
  }

  // Rotate the phase of each R_kk into Q so the diagonal is real positive.
  double min_diag = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < r; ++k) {
    const double mag = norm(f.R(k, k));
    min_diag = std::min(min_diag, mag);
    if (mag == 0.0) continue;
    const Quat d = f.R(k, k) / mag;
    const Quat dc = conj(d);
    for (Index j = k; j < r; ++j) f.R(k, j) = dc * f.R(k, j);
    f.R(k, k) = Quat(mag);
    for (Index i = 0; i < m; ++i) f.Q(i, k) = f.Q(i, k) * d;
  }
  if (r > 0 && !(min_diag > 1e-12 * fro_norm(Y)))
    throw RankDeficient("thin_qr: smallest |R_ii| below 1e-12 ||Y||_F");
  return f;
}

QMatrix solve_upper(const QMatrix& R, const QMatrix& B) {
  const Index n = R.rows();
  if (R.cols() != n || B.rows() != n) throw DimensionMismatch("solve_upper shapes");
  QMatrix Z = B;
  for (Index i = n - 1; i >= 0; --i) {
    for (Index j = i + 1; j < n; ++j) {
      const Quat rij = R(i, j);
      for (Index c = 0; c < B.cols(); ++c) Z(i, c) -= rij * Z(j, c);
    }
    const Quat rinv = inv(R(i, i));
    for (Index c = 0; c < B.cols(); ++c) Z(i, c) = rinv * Z(i, c);
  }
  return Z;
}

QMatrix pinv_thin_qr(const QMatrix& Y) {
  const QRFactors f = thin_qr(Y);
  return solve_upper(f.R, adjoint(f.Q));
}

QMatrix pinv_gram(const QMatrix& Y, double ridge) {
  const QMatrix YH = adjoint(Y);
  return hpd_solve(YH * Y, YH, ridge);
}

QMatrix hpd_solve(const QMatrix& G, const QMatrix& B, double ridge, HpdPath* used) {
  const Index n = G.rows();
  if (G.cols() != n || B.rows() != n) throw DimensionMismatch("hpd_solve shapes");
  const double gnorm = fro_norm(G);
  if (fro_norm(G - adjoint(G)) > 1e-10 * gnorm) throw NotHermitian("hpd_solve: G != G^H");

  const QMatrix Gs = shifted(G, ridge);
  const double bnorm = fro_norm(B);
  const double target = 1e-10 * bnorm;
  if (bnorm == 0.0) {
    if (used) *used = HpdPath::Cholesky;
    return QMatrix(n, B.cols());
  }

  QMatrix L;
  if (cholesky(Gs, L)) {
    QMatrix Z = cholesky_solve(L, B);
    Z += cholesky_solve(L, B - Gs * Z);  // one refinement step
    if (used) *used = HpdPath::Cholesky;
    return Z;
  }

  // Matrix CG on Z -> Gs Z under the real trace inner product.
  {
    QMatrix Z(n, B.cols());
    QMatrix R = B;
    QMatrix P = R;
    double rr = fro_norm2(R);
    const Index cap = 4 * std::max<Index>(n, 1);
    for (Index it = 0; it < cap && std::sqrt(rr) > target; ++it) {
      const QMatrix GP = Gs * P;
      const double curv = real_inner(P, GP);
      if (!(curv > 0.0)) break;
      const double step = rr / curv;
      Z.add_scaled(step, P);
      R.add_scaled(-step, GP);
      const double rr_new = fro_norm2(R);
      P *= rr_new / rr;
      P += R;
      rr = rr_new;
    }
    if (fro_norm(B - Gs * Z) <= target) {
      if (used) *used = HpdPath::ConjugateGradient;
      return Z;
    }
  }

  // Newton-Schulz on Gs^{-1}, started from Gs^H / ||Gs||_F^2.
  {
    const double gs = fro_norm2(Gs);
    QMatrix X = (1.0 / gs) * adjoint(Gs);
    for (int it = 0; it < 100; ++it) {
      const QMatrix E = identity_minus(Gs * X);
      if (fro_norm(E) <= 1e-13) break;
      X += X * E;
    }
    QMatrix Z = X * B;
    if (fro_norm(B - Gs * Z) <= target) {
      if (used) *used = HpdPath::NewtonSchulz;
      return Z;
    }
  }
  throw Indefinite("hpd_solve: Cholesky, CG and Newton-Schulz all failed to reach tolerance");
}

ComplexSvd jacobi_svd(const ComplexMatrix& C) {
  if (C.rows() < C.cols()) {
    ComplexSvd t = jacobi_svd(C.adjoint());
    std::swap(t.U, t.V);
    return t;
  }
  using Cplx = std::complex<double>;
  const Index rows = C.rows();
  const Index cols = C.cols();
  ComplexMatrix W = C;
  ComplexMatrix V = ComplexMatrix::Identity(cols, cols);
  const double tol = static_cast<double>(std::max<Index>(rows, 1)) * kEps;
  const double tiny = std::numeric_limits<double>::min() / kEps;

  int sweep = 0;
  for (;; ++sweep) {
    if (sweep >= 60) throw ConvergenceFailure("one-sided Jacobi exceeded 60 sweeps");
    bool rotated = false;
    for (Index p = 0; p < cols - 1; ++p) {
      for (Index q = p + 1; q < cols; ++q) {
        const double alpha = W.col(p).squaredNorm();
        const double beta = W.col(q).squaredNorm();
        if (alpha < tiny || beta < tiny) continue;
        const Cplx gamma = W.col(p).dot(W.col(q));  // w_p^H w_q
        const double g = std::abs(gamma);
        if (g <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const Cplx phase = std::conj(gamma) / g;  // e^{-i phi}
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (auto* M : {&W, &V}) {
          for (Index i = 0; i < M->rows(); ++i) {
            const Cplx xp = (*M)(i, p);
            const Cplx xq = phase * (*M)(i, q);
            (*M)(i, p) = c * xp - s * xq;
            (*M)(i, q) = s * xp + c * xq;
          }
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<Index> order(static_cast<std::size_t>(cols));
  std::iota(order.begin(), order.end(), Index{0});
  Eigen::VectorXd norms(cols);
  for (Index j = 0; j < cols; ++j) norms(j) = W.col(j).norm();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return norms(a) > norms(b); });

  ComplexSvd out;
  out.S.resize(cols);
  out.U = ComplexMatrix::Zero(rows, cols);
  out.V.resize(cols, cols);
  out.sweeps = sweep;
  for (Index k = 0; k < cols; ++k) {
    const Index j = order[static_cast<std::size_t>(k)];
    out.S(k) = norms(j);
    out.V.col(k) = V.col(j);
    if (norms(j) > 0.0) out.U.col(k) = W.col(j) / norms(j);
  }
  return out;
}

QSVDFactors qsvd(const QMatrix& A) {
  const Index m = A.rows();
  const Index n = A.cols();
  if (m < n) {
    QSVDFactors t = qsvd(adjoint(A));
    std::swap(t.U, t.V);
    return t;
  }
  const ComplexSvd csvd = jacobi_svd(to_complex_adjoint(A));

  // Each quaternion singular pair appears twice in the embedding; keep one
  // complex vector per pair by orthogonalizing over H.
  QSVDFactors f{QMatrix(m, m), Eigen::VectorXd::Zero(n), QMatrix(n, n)};
  Index accepted = 0;
  for (Index k = 0; k < csvd.V.cols() && accepted < n; ++k)
    accept_orthogonal(f.V, accepted, quaternion_from_embedded(csvd.V.col(k)), 0.5);
  if (accepted < n) complete_unitary(f.V, accepted);

  const QMatrix AV = A * f.V;
  for (Index i = 0; i < n; ++i) f.S(i) = fro_norm(column(AV, i));
  const double smax = n > 0 ? f.S.maxCoeff() : 0.0;

  Index ucount = 0;
  for (Index i = 0; i < n; ++i) {
    if (!(f.S(i) > 1e-13 * smax)) break;
    for (Index r = 0; r < m; ++r) f.U(r, i) = AV(r, i) / f.S(i);
    ++ucount;
  }
  complete_unitary(f.U, ucount);

  // Jacobi ordering is by complex norms; reorder on the quaternion values.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return f.S(a) > f.S(b); });
  if (!std::is_sorted(order.begin(), order.end())) {
    QSVDFactors g{f.U, f.S, f.V};
    for (Index k = 0; k < n; ++k) {
      const Index src = order[static_cast<std::size_t>(k)];
      g.S(k) = f.S(src);
      for (Index r = 0; r < n; ++r) g.V(r, k) = f.V(r, src);
      for (Index r = 0; r < m; ++r) g.U(r, k) = f.U(r, src);
    }
    return g;
  }
  return f;
}

QMatrix pinv_qsvd(const QMatrix& A, double rank_tol) {
  const QSVDFactors f = qsvd(A);
  const Index k = f.S.size();
  QMatrix X(A.cols(), A.rows());
  if (k == 0) return X;
  const double cutoff = rank_tol * f.S.maxCoeff();
  QMatrix VS(A.cols(), k);
  for (Index i = 0; i < A.cols(); ++i)
    for (Index j = 0; j < k; ++j)
      if (f.S(j) > cutoff && f.S(j) > 0.0) VS(i, j) = f.V(i, j) * (1.0 / f.S(j));
  QMatrix Uk = block(f.U, 0, 0, A.rows(), k);
  return VS * adjoint(Uk);
}

QMatrix pinv_normal_eq(const QMatrix& A, double ridge) {
  const QMatrix AH = adjoint(A);
  if (A.rows() >= A.cols()) return hpd_solve(AH * A, AH, ridge);
  return adjoint(hpd_solve(A * AH, A, ridge));
}

}  // namespace quatpinv
