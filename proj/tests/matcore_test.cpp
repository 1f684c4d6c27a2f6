#include "sqvar/matcore.hpp"

#include <gtest/gtest.h>

using namespace sqvar;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

TEST(SymMatrix, SymmetrizesWithinTolerance) {
  const SymMatrix s(mat2(1.0, 2.0 + 1e-10, 2.0, 3.0));
  EXPECT_DOUBLE_EQ(s(0, 1), s(1, 0));
  EXPECT_NEAR(s(0, 1), 2.0, 1e-9);
}

TEST(SymMatrix, RejectsAsymmetric) {
  try {
    SymMatrix s(mat2(1.0, 5.0, 2.0, 3.0));
    FAIL() << "expected NotSymmetric";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotSymmetric);
  }
}

TEST(SymMatrix, RejectsNonSquareAndNonFinite) {
  EXPECT_THROW(SymMatrix(Eigen::MatrixXd::Zero(2, 3)), Error);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(SymMatrix{m}, Error);
}

TEST(SymEig, IdentityAndIndefinite) {
  const EigDecomp ei = sym_eig(SymMatrix::Identity(2));
  EXPECT_DOUBLE_EQ(ei.sigma(0), 1.0);
  EXPECT_DOUBLE_EQ(ei.sigma(1), 1.0);
  EXPECT_EQ(ei.rank, 2);

  const EigDecomp ed = sym_eig(SymMatrix(mat2(1, 0, 0, -1)));
  EXPECT_DOUBLE_EQ(ed.sigma(0), 1.0);
  EXPECT_DOUBLE_EQ(ed.sigma(1), -1.0);
  EXPECT_EQ(ed.rank, 2);
}

// Construct-then-decompose: plant known eigenvalues through a random rotation.
TEST(SymEig, RecoversPlantedSpectrum) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.raw() % 6);
    Eigen::VectorXd diag = rng.gaussian_vector(d);
    std::sort(diag.data(), diag.data() + d, std::greater<double>());
    const Eigen::MatrixXd q = rng.orthogonal(d);
    const SymMatrix m(q * diag.asDiagonal() * q.transpose());
    const EigDecomp e = sym_eig(m);
    EXPECT_LT((e.sigma - diag).norm(), 1e-10 * (1.0 + diag.norm()));
    EXPECT_LT((e.U.transpose() * e.U - Eigen::MatrixXd::Identity(d, d)).norm(), 1e-10 * d);
    EXPECT_LT((e.U * e.sigma.asDiagonal() * e.U.transpose() - m.mat()).norm(), 1e-8 * (1.0 + m.norm()));
  }
}

TEST(Svd, ZeroAndDiagonal) {
  const SvdDecomp z = svd(Eigen::MatrixXd::Zero(3, 2));
  EXPECT_EQ(z.rank, 0);
  EXPECT_EQ(z.U.cols(), 0);

  const SvdDecomp d = svd(mat2(3, 0, 0, 4));
  ASSERT_EQ(d.rank, 2);
  EXPECT_DOUBLE_EQ(d.sigma(0), 4.0);
  EXPECT_DOUBLE_EQ(d.sigma(1), 3.0);
}

TEST(Svd, RankTwoProduct) {
  Rng rng(12);
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd a = rng.gaussian_matrix(6, 2);
    const Eigen::MatrixXd b = rng.gaussian_matrix(4, 2);
    const Eigen::MatrixXd m = a * b.transpose();
    const SvdDecomp s = svd(m);
    EXPECT_EQ(s.rank, 2);
    const Eigen::MatrixXd rec = s.U * s.sigma.asDiagonal() * s.V.transpose();
    EXPECT_LT((rec - m).norm(), 1e-8 * (1.0 + m.norm()));
    EXPECT_LT((s.U.transpose() * s.U - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-10);
    EXPECT_LT((s.V.transpose() * s.V - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-10);
  }
}

TEST(Pinv, DiagonalCases) {
  const SymMatrix p = pinv(SymMatrix(mat2(2, 0, 0, 0)));
  EXPECT_NEAR(p(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(p(1, 1), 0.0, 1e-14);
  EXPECT_LT((pinv(SymMatrix::Identity(3)).mat() - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-12);
}

TEST(Pinv, PenroseIdentities) {
  Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.raw() % 9);
    const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng.raw() % static_cast<std::uint64_t>(d));
    const Eigen::MatrixXd f = rng.gaussian_matrix(d, r);
    const SymMatrix x(f * f.transpose());
    const Eigen::MatrixXd xp = pinv(x).mat();
    const double tol = 1e-8 * (1.0 + x.norm());
    EXPECT_LT((x.mat() * xp * x.mat() - x.mat()).norm(), tol);
    EXPECT_LT((xp * x.mat() * xp - xp).norm(), tol * (1.0 + xp.norm()));
    EXPECT_LT((x.mat() * xp - (x.mat() * xp).transpose()).norm(), tol);
    EXPECT_LT((xp * x.mat() - (xp * x.mat()).transpose()).norm(), tol);
  }
}

TEST(NullSpaceBasis, SpansComplement) {
  const Eigen::MatrixXd v0 = null_space_basis(SymMatrix::Zero(3));
  EXPECT_EQ(v0.cols(), 3);
  EXPECT_LT((v0.transpose() * v0 - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-12);

  const Eigen::MatrixXd v1 = null_space_basis(SymMatrix(mat2(5, 0, 0, 0)));
  ASSERT_EQ(v1.cols(), 1);
  EXPECT_NEAR(std::abs(v1(1, 0)), 1.0, 1e-12);

  // Rank-one spike in the last coordinate: null space is the leading block.
  Eigen::MatrixXd xs = Eigen::MatrixXd::Zero(4, 4);
  xs(3, 3) = 5.0;
  const Eigen::MatrixXd v2 = null_space_basis(SymMatrix(xs));
  ASSERT_EQ(v2.cols(), 3);
  EXPECT_LT(v2.row(3).norm(), 1e-12);
}

TEST(SymProduct, PaperCases) {
  Rng rng(14);
  const Eigen::MatrixXd a = rng.gaussian_matrix(3, 3);
  EXPECT_LT((sym_product(a, Eigen::MatrixXd::Identity(3, 3)).mat() - 0.5 * (a + a.transpose())).norm(), 1e-14);

  const double y1 = 0.7, y2 = -1.3, y3 = 0.4;
  const Eigen::MatrixXd delta = mat2(y1, y3, y3, y2);
  const SymMatrix s1 = sym_product(mat2(1, 0, 0, -1), delta);
  EXPECT_NEAR(s1(0, 0), y1, 1e-14);
  EXPECT_NEAR(s1(0, 1), 0.0, 1e-14);
  EXPECT_NEAR(s1(1, 1), -y2, 1e-14);

  const SymMatrix s2 = sym_product(mat2(0, 1, 1, 0), delta);
  EXPECT_NEAR(s2(0, 0), y3, 1e-14);
  EXPECT_NEAR(s2(0, 1), 0.5 * (y1 + y2), 1e-14);
  EXPECT_NEAR(s2(1, 1), y3, 1e-14);
}

TEST(SymProduct, BilinearInEachArgument) {
  Rng rng(15);
  const Eigen::MatrixXd a = rng.gaussian_matrix(4, 4), b = rng.gaussian_matrix(4, 4),
                        c = rng.gaussian_matrix(4, 4);
  const Eigen::MatrixXd lhs = sym_product(a + 2.0 * b, c).mat();
  const Eigen::MatrixXd rhs = sym_product(a, c).mat() + 2.0 * sym_product(b, c).mat();
  EXPECT_LT((lhs - rhs).norm(), 1e-12);
  EXPECT_THROW(sym_product(a, rng.gaussian_matrix(3, 3)), Error);
}

TEST(PsdSqrt, RootsAndRejection) {
  EXPECT_LT((psd_sqrt(SymMatrix::Identity(3)).mat() - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-12);
  const SymMatrix r = psd_sqrt(SymMatrix(mat2(4, 0, 0, 0)));
  EXPECT_NEAR(r(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(r(1, 1), 0.0, 1e-12);

  Eigen::MatrixXd xs = Eigen::MatrixXd::Zero(4, 4);
  xs(3, 3) = 5.0;
  const SymMatrix rs = psd_sqrt(SymMatrix(xs));
  EXPECT_NEAR(rs(3, 3), std::sqrt(5.0), 1e-12);
  EXPECT_LT(rs.norm() - std::sqrt(5.0), 1e-12);

  Rng rng(16);
  const Eigen::MatrixXd f = rng.gaussian_matrix(5, 3);
  const SymMatrix x(f * f.transpose());
  const SymMatrix root = psd_sqrt(x);
  EXPECT_LT((root.mat() * root.mat() - x.mat()).norm(), 1e-8 * (1.0 + x.norm()));

  try {
    psd_sqrt(SymMatrix(mat2(1, 0, 0, -1)));
    FAIL() << "expected NotPsd";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotPsd);
  }
}

TEST(Svec, OrderingAndIsometry) {
  const Eigen::VectorXd vi = svec(SymMatrix::Identity(2));
  ASSERT_EQ(vi.size(), 3);
  EXPECT_DOUBLE_EQ(vi(0), 1.0);
  EXPECT_DOUBLE_EQ(vi(1), 0.0);
  EXPECT_DOUBLE_EQ(vi(2), 1.0);

  const Eigen::VectorXd vs = svec(SymMatrix(mat2(0, 1, 1, 0)));
  EXPECT_DOUBLE_EQ(vs(0), 0.0);
  EXPECT_DOUBLE_EQ(vs(1), kSqrt2);
  EXPECT_DOUBLE_EQ(vs(2), 0.0);
  EXPECT_DOUBLE_EQ(vs.dot(vs), 2.0);

  Rng rng(17);
  for (int t = 0; t < 25; ++t) {
    const SymMatrix w1 = rng.gaussian_symmetric(5), w2 = rng.gaussian_symmetric(5);
    EXPECT_NEAR(svec(w1).dot(svec(w2)), fdot(w1.mat(), w2.mat()), 1e-12 * (1.0 + w1.norm() * w2.norm()));
    EXPECT_LT((smat(svec(w1)).mat() - w1.mat()).norm(), 1e-15);
  }
  EXPECT_THROW(smat(Eigen::VectorXd::Zero(4)), Error);
}

TEST(Rng, DeterministicStreamsAndOrthogonality) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_DOUBLE_EQ(a.normal(), b.normal());
  Rng c(43);
  const Eigen::MatrixXd q = c.orthogonal(6);
  EXPECT_LT((q.transpose() * q - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-12);
}

}  // namespace
