#include "quatpinv/qmatrix.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "quatpinv/random.hpp"

namespace quatpinv {

namespace {

int threads_from_env() {
  const char* env = std::getenv("QUATPINV_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> n{threads_from_env()};
  return n;
}

}  // namespace

int max_threads() { return thread_setting().load(); }

void set_max_threads(int n) { thread_setting().store(n >= 1 ? n : 1); }

void parallel_rows(Index rows, double work, const std::function<void(Index, Index)>& fn) {
  const int threads = max_threads();
  if (threads <= 1 || rows < 2 || work < 2e5) {
    fn(0, rows);
    return;
  }
  const Index parts = std::min<Index>(threads, rows);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(parts - 1));
  const Index chunk = (rows + parts - 1) / parts;
  for (Index p = 1; p < parts; ++p) {
    const Index r0 = p * chunk;
    const Index r1 = std::min(rows, r0 + chunk);
    if (r0 < r1) pool.emplace_back([&fn, r0, r1] { fn(r0, r1); });
  }
  fn(0, std::min(rows, chunk));
  for (auto& t : pool) t.join();
}

Eigen::MatrixXd component(const QMatrix& A, int which) {
  if (which < 0 || which > 3) throw InvalidArgument("component index must be 0..3");
  Eigen::MatrixXd out(A.rows(), A.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) {
      const Quat& q = A(i, j);
      out(i, j) = which == 0 ? q.a : which == 1 ? q.b : which == 2 ? q.c : q.d;
    }
  return out;
}

void set_component(QMatrix& A, int which, const Eigen::MatrixXd& values) {
  if (which < 0 || which > 3) throw InvalidArgument("component index must be 0..3");
  if (values.rows() != A.rows() || values.cols() != A.cols())
    throw DimensionMismatch("set_component shape");
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) {
      Quat& q = A(i, j);
      (which == 0 ? q.a : which == 1 ? q.b : which == 2 ? q.c : q.d) = values(i, j);
    }
}

QMatrix randn_qmat(Index m, Index n, std::uint64_t seed) {
  NormalRng rng(seed);
  QMatrix A(m, n);
  for (auto& q : A.data()) q = rng.quaternion();
  return A;
}

double op_norm_est(const QMatrix& A, int iters, std::uint64_t seed) {
  if (iters < 1) throw InvalidArgument("op_norm_est needs iters >= 1");
  if (A.empty()) return 0.0;
  QMatrix v = randn_qmat(A.cols(), 1, seed);
  double nv = fro_norm(v);
  if (nv == 0.0) return 0.0;
  v *= 1.0 / nv;
  const QMatrix AH = adjoint(A);
  for (int it = 0; it < iters; ++it) {
    QMatrix w = AH * (A * v);
    const double nw = fro_norm(w);
    if (nw == 0.0) return 0.0;
    v = std::move(w);
    v *= 1.0 / nw;
  }
  return fro_norm(A * v);
}

ComplexMatrix to_complex_adjoint(const QMatrix& A) {
  using C = std::complex<double>;
  ComplexMatrix out(2 * A.rows(), 2 * A.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) {
      const Quat& q = A(i, j);
      out(2 * i, 2 * j) = C(q.a, q.b);
      out(2 * i, 2 * j + 1) = C(q.c, q.d);
      out(2 * i + 1, 2 * j) = C(-q.c, q.d);
      out(2 * i + 1, 2 * j + 1) = C(q.a, -q.b);
    }
  return out;
}

QMatrix from_complex_adjoint(const ComplexMatrix& Cm) {
  if (Cm.rows() % 2 != 0 || Cm.cols() % 2 != 0)
    throw StructureViolation("complex embedding needs even dimensions");
  const double tol = 1e-8 * Cm.norm();
  double defect2 = 0.0;
  QMatrix A(Cm.rows() / 2, Cm.cols() / 2);
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) {
      const auto z1 = Cm(2 * i, 2 * j);
      const auto z2 = Cm(2 * i, 2 * j + 1);
      defect2 += std::norm(Cm(2 * i + 1, 2 * j) + std::conj(z2));
      defect2 += std::norm(Cm(2 * i + 1, 2 * j + 1) - std::conj(z1));
      A(i, j) = Quat(z1.real(), z1.imag(), z2.real(), z2.imag());
    }
  if (std::sqrt(defect2) > tol)
    throw StructureViolation("matrix lacks the quaternion adjoint block symmetry");
  return A;
}

std::string format_qmat(const QMatrix& A) {
  std::string out = "QMAT " + std::to_string(A.rows()) + " " + std::to_string(A.cols()) + "\n";
  char buf[128];
  for (const auto& q : A.data()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", q.a, q.b, q.c, q.d);
    out += buf;
  }
  return out;
}

QMatrix parse_qmat(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  Index m = -1, n = -1;
  if (!(in >> tag >> m >> n) || tag != "QMAT" || m < 0 || n < 0)
    throw IoError("missing or malformed QMAT header");
  QMatrix A(m, n);
  for (auto& q : A.data())
    if (!(in >> q.a >> q.b >> q.c >> q.d)) throw IoError("QMAT body shorter than m*n entries");
  return A;
}

void write_qmat(const std::string& path, const QMatrix& A) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << format_qmat(A);
  if (!out) throw IoError("write failed: " + path);
}

QMatrix read_qmat(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_qmat(ss.str());
}

}  // namespace quatpinv
