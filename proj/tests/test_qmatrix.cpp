#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "oracles.hpp"
#include "quatpinv/qmatrix.hpp"
#include "quatpinv/random.hpp"

using namespace quatpinv;

TEST(QMatrix, UnitProduct) {
  const QMatrix I{{Quat::i()}}, J{{Quat::j()}};
  EXPECT_EQ((I * J)(0, 0), Quat::k());
  EXPECT_EQ((J * I)(0, 0), -Quat::k());
}

TEST(QMatrix, IdentityIsNeutral) {
  const QMatrix A = randn_qmat(3, 3, 1);
  EXPECT_EQ(A * QMatrix::identity(3), A);
  EXPECT_EQ(QMatrix::identity(3) * A, A);
}

TEST(QMatrix, ProductMatchesEmbeddingOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QMatrix A = randn_qmat(7, 70, seed), B = randn_qmat(70, 5, seed + 100);
    EXPECT_LE(max_abs_diff(A * B, oracle::matmul(A, B)), 1e-12);
  }
}

TEST(QMatrix, AdjointReversesProducts) {
  const QMatrix A = randn_qmat(2, 3, 2), B = randn_qmat(3, 2, 3);
  EXPECT_LE(max_abs_diff(adjoint(A * B), adjoint(B) * adjoint(A)), 1e-14);
}

TEST(QMatrix, DimensionMismatch) {
  EXPECT_THROW(randn_qmat(2, 3, 0) * randn_qmat(2, 3, 0), DimensionMismatch);
  EXPECT_THROW(randn_qmat(2, 3, 0) + randn_qmat(3, 2, 0), DimensionMismatch);
  EXPECT_THROW((QMatrix{{Quat(1.0), Quat(2.0)}, {Quat(1.0)}}), DimensionMismatch);
}

TEST(QMatrix, AdjointOfRowVector) {
  const QMatrix A{{Quat::i(), Quat::j()}};
  const QMatrix H = adjoint(A);
  ASSERT_EQ(H.rows(), 2);
  ASSERT_EQ(H.cols(), 1);
  EXPECT_EQ(H(0, 0), -Quat::i());
  EXPECT_EQ(H(1, 0), -Quat::j());
}

TEST(QMatrix, AdjointInvolutionAndHermitian) {
  const QMatrix A = randn_qmat(4, 2, 4);
  EXPECT_EQ(adjoint(adjoint(A)), A);
  const QMatrix B = randn_qmat(3, 3, 5);
  const QMatrix H = B + adjoint(B);
  EXPECT_EQ(adjoint(H), H);
}

TEST(QMatrix, FrobeniusNorm) {
  EXPECT_DOUBLE_EQ(fro_norm(QMatrix::identity(3)), std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(fro_norm(QMatrix{{Quat(1, 1, 1, 1)}}), 2.0);
  const QMatrix A = randn_qmat(5, 4, 6);
  const Quat u = Quat(1, 2, -1, 3) / norm(Quat(1, 2, -1, 3));
  const QMatrix U = QMatrix::identity(5) * u;
  EXPECT_NEAR(fro_norm(U * A), fro_norm(A), 1e-13);
  EXPECT_NEAR(fro_norm(adjoint(A)), fro_norm(A), 1e-13);
}

TEST(QMatrix, OpNormEstimate) {
  const std::vector<Quat> d{Quat(3.0), Quat(1.0)};
  EXPECT_NEAR(op_norm_est(QMatrix::diagonal(d), 20, 0), 3.0, 1e-6);
  EXPECT_EQ(op_norm_est(QMatrix(4, 3), 20, 0), 0.0);
  const QMatrix A = randn_qmat(20, 10, 7);
  const double est = op_norm_est(A, 20, 1);
  EXPECT_LE(est, fro_norm(A));
  EXPECT_GE(est, fro_norm(A) / std::sqrt(10.0));
  EXPECT_LE(est, oracle::singular_values(A)(0) * (1 + 1e-6));
}

TEST(QMatrix, RandnStatistics) {
  const QMatrix A = randn_qmat(100, 100, 42);
  EXPECT_NEAR(fro_norm2(A) / 1e4, 4.0, 0.2);
  EXPECT_EQ(randn_qmat(10, 10, 3), randn_qmat(10, 10, 3));
  const QMatrix B = randn_qmat(100, 100, 43);
  Index differing = 0;
  for (Index t = 0; t < A.size(); ++t) differing += A.data()[t] != B.data()[t];
  EXPECT_GE(differing, 9900);
}

TEST(QMatrix, ComplexEmbedding) {
  const ComplexMatrix one = to_complex_adjoint(QMatrix{{Quat(1.0)}});
  EXPECT_TRUE(one.isApprox(Eigen::Matrix2cd::Identity()));
  const ComplexMatrix jj = to_complex_adjoint(QMatrix{{Quat::j()}});
  Eigen::Matrix2cd expected;
  expected << 0, 1, -1, 0;
  EXPECT_TRUE(jj.isApprox(expected));
  const QMatrix A = randn_qmat(3, 2, 9);
  EXPECT_NEAR(to_complex_adjoint(A).squaredNorm(), 2 * fro_norm2(A), 1e-12);
  EXPECT_TRUE(to_complex_adjoint(A).isApprox(oracle::embed(A)));
}

TEST(QMatrix, ComplexEmbeddingRoundTrip) {
  const QMatrix A = randn_qmat(3, 4, 10);
  EXPECT_EQ(from_complex_adjoint(to_complex_adjoint(A)), A);
  EXPECT_EQ(from_complex_adjoint(Eigen::Matrix2cd::Identity()), (QMatrix{{Quat(1.0)}}));
  ComplexMatrix bad = to_complex_adjoint(A);
  bad(1, 1) += 1.0;
  EXPECT_THROW(from_complex_adjoint(bad), StructureViolation);
  EXPECT_THROW(from_complex_adjoint(ComplexMatrix(3, 2)), StructureViolation);
}

TEST(QMatrix, SlicingAndMasks) {
  const QMatrix A = randn_qmat(4, 5, 11);
  const std::vector<Index> rows{2, 0, 2}, cols{4, 1};
  const QMatrix S = submatrix(A, rows, cols);
  ASSERT_EQ(S.rows(), 3);
  ASSERT_EQ(S.cols(), 2);
  EXPECT_EQ(S(0, 0), A(2, 4));
  EXPECT_EQ(S(1, 1), A(0, 1));
  EXPECT_EQ(S(2, 1), A(2, 1));
  const std::vector<Index> out_of_range{5};
  EXPECT_THROW(select_cols(A, out_of_range), DimensionMismatch);

  Mask mask = Mask::Zero(4, 5);
  mask(1, 2) = 1;
  const QMatrix X = randn_qmat(4, 5, 12);
  const QMatrix C = blend(mask, A, X);
  EXPECT_EQ(C(1, 2), A(1, 2));
  EXPECT_EQ(C(0, 0), X(0, 0));
  EXPECT_EQ(masked(mask, A)(0, 0), Quat());
  EXPECT_EQ(masked(mask, A)(1, 2), A(1, 2));
}

TEST(QMatrix, ScalingOrderIsKept) {
  const QMatrix A = randn_qmat(3, 3, 13);
  const Quat q(0.5, 1.0, -2.0, 0.25);
  const QMatrix L = q * A, R = A * q;
  EXPECT_GT(max_abs_diff(L, R), 1e-3);
  EXPECT_EQ(L(1, 2), q * A(1, 2));
  EXPECT_EQ(R(1, 2), A(1, 2) * q);
}

TEST(QMatrix, Hadamard) {
  const QMatrix A{{Quat::i(), Quat(2.0)}}, B{{Quat::j(), Quat::k()}};
  const QMatrix H = hadamard(A, B);
  EXPECT_EQ(H(0, 0), Quat::k());
  EXPECT_EQ(H(0, 1), 2.0 * Quat::k());
}

TEST(QMatrix, TextFormatRoundTrip) {
  const QMatrix A = randn_qmat(3, 2, 14);
  EXPECT_EQ(parse_qmat(format_qmat(A)), A);
  EXPECT_EQ(format_qmat(QMatrix{{Quat(1, 2, 3, 4)}}), "QMAT 1 1\n1 2 3 4\n");
  const auto path = std::filesystem::temp_directory_path() / "quatpinv_qmat_test.txt";
  write_qmat(path.string(), A);
  EXPECT_EQ(read_qmat(path.string()), A);
  std::filesystem::remove(path);
  EXPECT_THROW(parse_qmat("QMAT 1 1\n1 2 3\n"), IoError);
  EXPECT_THROW(parse_qmat("MAT 1 1\n1 2 3 4\n"), IoError);
  EXPECT_THROW(read_qmat("/nonexistent/file"), IoError);
}

TEST(QMatrix, ThreadedProductIsBitwiseEqual) {
  const QMatrix A = randn_qmat(120, 80, 15), B = randn_qmat(80, 90, 16);
  const int before = max_threads();
  set_max_threads(1);
  const QMatrix serial = A * B;
  set_max_threads(3);
  const QMatrix threaded = A * B;
  set_max_threads(before);
  EXPECT_EQ(serial, threaded);
}

TEST(QMatrixProperty, Submultiplicative) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const QMatrix A = randn_qmat(4, 3, 2 * seed), B = randn_qmat(3, 5, 2 * seed + 1);
    EXPECT_LE(fro_norm(A * B), fro_norm(A) * fro_norm(B) * (1 + 1e-14));
  }
}
