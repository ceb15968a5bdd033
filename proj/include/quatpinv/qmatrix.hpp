#pragma once

// Dense row-major quaternion matrices.
//
// QuatMatrix<T> is a plain value type. Products keep the left/right order of
// their operands, so A*B and B*A, q*A and A*q are all distinct operations.

#include <Eigen/Core>
#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "quatpinv/errors.hpp"
#include "quatpinv/quaternion.hpp"

namespace quatpinv {

using Index = std::ptrdiff_t;

/// Binary sampling mask (entries 0 or 1), same shape as the matrix it masks.
using Mask = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Number of worker threads used by matmul; QUATPINV_THREADS, default 1.
int max_threads();
void set_max_threads(int n);

/// Runs fn(begin, end) over a partition of [0, rows). Each row is handled by
/// exactly one call, so per-row results do not depend on the partition.
void parallel_rows(Index rows, double work, const std::function<void(Index, Index)>& fn);

template <typename T>
class QuatMatrix {
 public:
  using Scalar = Quaternion<T>;

  QuatMatrix() = default;
  QuatMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), data_(checked_size(rows, cols)) {}
  QuatMatrix(Index rows, Index cols, const Scalar& fill)
      : rows_(rows), cols_(cols), data_(checked_size(rows, cols), fill) {}

  /// Row-major nested initializer: {{q00, q01}, {q10, q11}}.
  QuatMatrix(std::initializer_list<std::initializer_list<Scalar>> init) {
    rows_ = static_cast<Index>(init.size());
    cols_ = rows_ ? static_cast<Index>(init.begin()->size()) : 0;
    data_.reserve(static_cast<std::size_t>(rows_ * cols_));
    for (const auto& r : init) {
      if (static_cast<Index>(r.size()) != cols_) throw DimensionMismatch("ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static QuatMatrix zeros(Index rows, Index cols) { return QuatMatrix(rows, cols); }

  static QuatMatrix identity(Index n) {
    QuatMatrix I(n, n);
    for (Index i = 0; i < n; ++i) I(i, i) = Scalar(T(1));
    return I;
  }

  /// Diagonal matrix from quaternion entries.
  static QuatMatrix diagonal(std::span<const Scalar> diag) {
    const auto n = static_cast<Index>(diag.size());
    QuatMatrix D(n, n);
    for (Index i = 0; i < n; ++i) D(i, i) = diag[static_cast<std::size_t>(i)];
    return D;
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index size() const { return rows_ * cols_; }
  bool empty() const { return data_.empty(); }

  Scalar& operator()(Index i, Index j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  const Scalar& operator()(Index i, Index j) const {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }

  Scalar* row_ptr(Index i) { return data_.data() + i * cols_; }
  const Scalar* row_ptr(Index i) const { return data_.data() + i * cols_; }

  std::span<Scalar> data() { return data_; }
  std::span<const Scalar> data() const { return data_; }

  QuatMatrix& operator+=(const QuatMatrix& o) {
    check_same_shape(o, "+=");
    for (std::size_t t = 0; t < data_.size(); ++t) data_[t] += o.data_[t];
    return *this;
  }
  QuatMatrix& operator-=(const QuatMatrix& o) {
    check_same_shape(o, "-=");
    for (std::size_t t = 0; t < data_.size(); ++t) data_[t] -= o.data_[t];
    return *this;
  }
  QuatMatrix& operator*=(T s) {
    for (auto& q : data_) q *= s;
    return *this;
  }

  /// this += s * o, with s real.
  QuatMatrix& add_scaled(T s, const QuatMatrix& o) {
    check_same_shape(o, "add_scaled");
    for (std::size_t t = 0; t < data_.size(); ++t) data_[t] += s * o.data_[t];
    return *this;
  }

  /// Adds s to every diagonal entry.
  QuatMatrix& add_identity(T s = T(1)) {
    for (Index i = 0; i < std::min(rows_, cols_); ++i) (*this)(i, i).a += s;
    return *this;
  }

  friend bool operator==(const QuatMatrix&, const QuatMatrix&) = default;

 private:
  static std::size_t checked_size(Index rows, Index cols) {
    if (rows < 0 || cols < 0) throw DimensionMismatch("negative matrix dimension");
    return static_cast<std::size_t>(rows * cols);
  }
  void check_same_shape(const QuatMatrix& o, const char* op) const {
    if (o.rows_ != rows_ || o.cols_ != cols_)
      throw DimensionMismatch(std::string(op) + ": shapes differ");
  }

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Scalar> data_;
};

using QMatrix = QuatMatrix<double>;

// ---------------------------------------------------------------------------
// Elementwise arithmetic

template <typename T>
QuatMatrix<T> operator+(QuatMatrix<T> A, const QuatMatrix<T>& B) {
  return A += B;
}
template <typename T>
QuatMatrix<T> operator-(QuatMatrix<T> A, const QuatMatrix<T>& B) {
  return A -= B;
}
template <typename T>
QuatMatrix<T> operator-(QuatMatrix<T> A) {
  for (auto& q : A.data()) q = -q;
  return A;
}
template <typename T>
QuatMatrix<T> operator*(QuatMatrix<T> A, T s) {
  return A *= s;
}
template <typename T>
QuatMatrix<T> operator*(T s, QuatMatrix<T> A) {
  return A *= s;
}

/// q*A: every entry multiplied by q from the left.
template <typename T>
QuatMatrix<T> operator*(const Quaternion<T>& q, QuatMatrix<T> A) {
  for (auto& x : A.data()) x = q * x;
  return A;
}

/// A*q: every entry multiplied by q from the right.
template <typename T>
QuatMatrix<T> operator*(QuatMatrix<T> A, const Quaternion<T>& q) {
  for (auto& x : A.data()) x = x * q;
  return A;
}

/// I - A for square A.
template <typename T>
QuatMatrix<T> identity_minus(QuatMatrix<T> A) {
  if (A.rows() != A.cols()) throw DimensionMismatch("identity_minus on non-square matrix");
  for (auto& q : A.data()) q = -q;
  return A.add_identity();
}

// ---------------------------------------------------------------------------
// Products

namespace detail {

// C[r0:r1, :] += A[r0:r1, :] * B, blocked over the inner dimension.
template <typename T>
void gemm_rows(const QuatMatrix<T>& A, const QuatMatrix<T>& B, QuatMatrix<T>& C, Index r0, Index r1) {
  constexpr Index kBlock = 64;
  const Index inner = A.cols();
  const Index n = B.cols();
  for (Index k0 = 0; k0 < inner; k0 += kBlock) {
    const Index k1 = std::min(inner, k0 + kBlock);
    for (Index i = r0; i < r1; ++i) {
      T* __restrict c = reinterpret_cast<T*>(C.row_ptr(i));
      const Quaternion<T>* arow = A.row_ptr(i);
      for (Index k = k0; k < k1; ++k) {
        const Quaternion<T> q = arow[k];
        if (q.a == T(0) && q.b == T(0) && q.c == T(0) && q.d == T(0)) continue;
        const T* __restrict b = reinterpret_cast<const T*>(B.row_ptr(k));
        for (Index j = 0; j < n; ++j) {
          const T b0 = b[4 * j], b1 = b[4 * j + 1], b2 = b[4 * j + 2], b3 = b[4 * j + 3];
          c[4 * j] += q.a * b0 - q.b * b1 - q.c * b2 - q.d * b3;
          c[4 * j + 1] += q.a * b1 + q.b * b0 + q.c * b3 - q.d * b2;
          c[4 * j + 2] += q.a * b2 - q.b * b3 + q.c * b0 + q.d * b1;
          c[4 * j + 3] += q.a * b3 + q.b * b2 - q.c * b1 + q.d * b0;
        }
      }
    }
  }
}

}  // namespace detail

/// C = A*B with C[i,j] = sum_l A[i,l]*B[l,j] (quaternion products in that order).
template <typename T>
QuatMatrix<T> matmul(const QuatMatrix<T>& A, const QuatMatrix<T>& B) {
  if (A.cols() != B.rows()) throw DimensionMismatch("matmul inner dimensions differ");
  QuatMatrix<T> C(A.rows(), B.cols());
  const double work = static_cast<double>(A.rows()) * static_cast<double>(A.cols()) *
                      static_cast<double>(B.cols());
  parallel_rows(A.rows(), work, [&](Index r0, Index r1) { detail::gemm_rows(A, B, C, r0, r1); });
  return C;
}

template <typename T>
QuatMatrix<T> operator*(const QuatMatrix<T>& A, const QuatMatrix<T>& B) {
  return matmul(A, B);
}

/// A^H, the conjugate transpose.
template <typename T>
QuatMatrix<T> adjoint(const QuatMatrix<T>& A) {
  QuatMatrix<T> H(A.cols(), A.rows());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) H(j, i) = conj(A(i, j));
  return H;
}

/// Entrywise product A[i,j]*B[i,j].
template <typename T>
QuatMatrix<T> hadamard(const QuatMatrix<T>& A, const QuatMatrix<T>& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw DimensionMismatch("hadamard shapes differ");
  QuatMatrix<T> C(A.rows(), A.cols());
  for (Index t = 0; t < A.size(); ++t) C.data()[t] = A.data()[t] * B.data()[t];
  return C;
}

/// mask .* A
template <typename T>
QuatMatrix<T> masked(const Mask& mask, const QuatMatrix<T>& A) {
  if (mask.rows() != A.rows() || mask.cols() != A.cols()) throw DimensionMismatch("mask shape");
  QuatMatrix<T> C(A.rows(), A.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j)
      if (mask(i, j)) C(i, j) = A(i, j);
  return C;
}

/// mask .* M + (1 - mask) .* X
template <typename T>
QuatMatrix<T> blend(const Mask& mask, const QuatMatrix<T>& M, const QuatMatrix<T>& X) {
  if (mask.rows() != M.rows() || mask.cols() != M.cols() || M.rows() != X.rows() ||
      M.cols() != X.cols())
    throw DimensionMismatch("blend shapes differ");
  QuatMatrix<T> C(M.rows(), M.cols());
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) C(i, j) = mask(i, j) ? M(i, j) : X(i, j);
  return C;
}

// ---------------------------------------------------------------------------
// Norms and inner products

template <typename T>
T fro_norm2(const QuatMatrix<T>& A) {
  T s = 0;
  for (const auto& q : A.data()) s += norm2(q);
  return s;
}

template <typename T>
T fro_norm(const QuatMatrix<T>& A) {
  return std::sqrt(fro_norm2(A));
}

/// Re tr(U^H V)
template <typename T>
T real_inner(const QuatMatrix<T>& U, const QuatMatrix<T>& V) {
  if (U.rows() != V.rows() || U.cols() != V.cols()) throw DimensionMismatch("real_inner shapes");
  T s = 0;
  for (Index t = 0; t < U.size(); ++t) s += real_dot(U.data()[t], V.data()[t]);
  return s;
}

/// Largest |A[i,j] - B[i,j]| over all components.
template <typename T>
T max_abs_diff(const QuatMatrix<T>& A, const QuatMatrix<T>& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw DimensionMismatch("max_abs_diff shapes");
  T m = 0;
  for (Index t = 0; t < A.size(); ++t) {
    const auto d = A.data()[t] - B.data()[t];
    m = std::max({m, std::abs(d.a), std::abs(d.b), std::abs(d.c), std::abs(d.d)});
  }
  return m;
}

// ---------------------------------------------------------------------------
// Slicing

template <typename T>
QuatMatrix<T> select_rows(const QuatMatrix<T>& A, std::span<const Index> rows) {
  QuatMatrix<T> S(static_cast<Index>(rows.size()), A.cols());
  for (Index r = 0; r < S.rows(); ++r) {
    const Index src = rows[static_cast<std::size_t>(r)];
    if (src < 0 || src >= A.rows()) throw DimensionMismatch("row index out of range");
    std::copy_n(A.row_ptr(src), A.cols(), S.row_ptr(r));
  }
  return S;
}

template <typename T>
QuatMatrix<T> select_cols(const QuatMatrix<T>& A, std::span<const Index> cols) {
  QuatMatrix<T> S(A.rows(), static_cast<Index>(cols.size()));
  for (Index c = 0; c < S.cols(); ++c) {
    const Index src = cols[static_cast<std::size_t>(c)];
    if (src < 0 || src >= A.cols()) throw DimensionMismatch("column index out of range");
    for (Index i = 0; i < A.rows(); ++i) S(i, c) = A(i, src);
  }
  return S;
}

template <typename T>
QuatMatrix<T> submatrix(const QuatMatrix<T>& A, std::span<const Index> rows, std::span<const Index> cols) {
  return select_cols(select_rows(A, rows), cols);
}

/// Contiguous block A[r0:r0+nr, c0:c0+nc].
template <typename T>
QuatMatrix<T> block(const QuatMatrix<T>& A, Index r0, Index c0, Index nr, Index nc) {
  if (r0 < 0 || c0 < 0 || r0 + nr > A.rows() || c0 + nc > A.cols())
    throw DimensionMismatch("block out of range");
  QuatMatrix<T> B(nr, nc);
  for (Index i = 0; i < nr; ++i) std::copy_n(A.row_ptr(r0 + i) + c0, nc, B.row_ptr(i));
  return B;
}

/// Column j as an n x 1 matrix.
template <typename T>
QuatMatrix<T> column(const QuatMatrix<T>& A, Index j) {
  return block(A, 0, j, A.rows(), 1);
}

// ---------------------------------------------------------------------------
// Real component views

/// Component 0..3 (a, b, c, d) of every entry as a real matrix.
Eigen::MatrixXd component(const QMatrix& A, int which);
void set_component(QMatrix& A, int which, const Eigen::MatrixXd& values);

// ---------------------------------------------------------------------------
// Random matrices and spectral estimates

/// Entries with all four components i.i.d. N(0, 1); deterministic in seed.
QMatrix randn_qmat(Index m, Index n, std::uint64_t seed);

/// Power-iteration estimate of ||A||_2 on A^H A; returns sqrt(Rayleigh quotient).
double op_norm_est(const QMatrix& A, int iters, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Complex adjoint embedding

using ComplexMatrix = Eigen::MatrixXcd;

/// q = a+bi+cj+dk maps to the block [[a+bi, c+di], [-c+di, a-bi]].
ComplexMatrix to_complex_adjoint(const QMatrix& A);

/// Inverse of to_complex_adjoint. Throws StructureViolation when the block
/// symmetry is off by more than 1e-8 * ||C||_F.
QMatrix from_complex_adjoint(const ComplexMatrix& C);

// ---------------------------------------------------------------------------
// Text file format: "QMAT m n" then m*n lines "a b c d" (row-major, %.17g).

void write_qmat(const std::string& path, const QMatrix& A);
QMatrix read_qmat(const std::string& path);
std::string format_qmat(const QMatrix& A);
QMatrix parse_qmat(const std::string& text);

}  // namespace quatpinv
