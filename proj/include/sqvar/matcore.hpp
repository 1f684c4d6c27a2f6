#pragma once

// Dense symmetric-matrix core: validated symmetric wrapper, eigen/SVD plumbing,
// pseudoinverse, null-space bases, the symmetrized product, and svec/smat.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sqvar/errors.hpp"

namespace sqvar {

inline constexpr double kDefaultSymTol = 1e-8;
inline constexpr double kDefaultRankTol = 1e-9;
inline constexpr double kDefaultSubTol = 1e-8;

inline const double kSqrt2 = std::sqrt(2.0);

// Frobenius inner product tr(A^T B).
inline double fdot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

// Square matrix validated to be (numerically) symmetric; stores (M + M^T)/2.
class SymMatrix {
 public:
  SymMatrix() : m_(0, 0) {}

  explicit SymMatrix(const Eigen::MatrixXd& m, double sym_tol = kDefaultSymTol) {
    require(m.rows() == m.cols(), Errc::DimensionMismatch, "symmetric matrix must be square");
    require(m.allFinite(), Errc::NonFinite, "matrix has non-finite entries");
    if (m.size() > 0) {
      const double scale = 1.0 + m.cwiseAbs().maxCoeff();
      const double skew = (m - m.transpose()).cwiseAbs().maxCoeff();
      require(skew <= sym_tol * scale, Errc::NotSymmetric, "matrix is not symmetric within tolerance");
    }
    m_ = 0.5 * (m + m.transpose());
  }

  static SymMatrix Zero(Eigen::Index d) { return SymMatrix(Eigen::MatrixXd::Zero(d, d)); }
  static SymMatrix Identity(Eigen::Index d) { return SymMatrix(Eigen::MatrixXd::Identity(d, d)); }

  Eigen::Index dim() const { return m_.rows(); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double norm() const { return m_.norm(); }

 private:
  Eigen::MatrixXd m_;
};

using Factor = Eigen::MatrixXd;     // d x k, 1 <= k <= d at the call sites that care
using Multiplier = SymMatrix;

inline void require_finite(const Eigen::MatrixXd& m, const char* what) {
  require(m.allFinite(), Errc::NonFinite, what);
}

// Eigendecomposition of a symmetric matrix, eigenvalues nonincreasing.
// rank counts |sigma_i| > rank_tol * max(1, ||M||_2).
struct EigDecomp {
  Eigen::MatrixXd U;
  Eigen::VectorXd sigma;
  Eigen::Index rank = 0;
};

inline EigDecomp sym_eig(const SymMatrix& m, double rank_tol = kDefaultRankTol) {
  const Eigen::Index d = m.dim();
  EigDecomp out;
  if (d == 0) {
    out.U.resize(0, 0);
    out.sigma.resize(0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.mat());
  require(es.info() == Eigen::Success, Errc::NonFinite, "eigendecomposition failed");
  // Eigen sorts increasing; flip to nonincreasing.
  out.U = es.eigenvectors().rowwise().reverse();
  out.sigma = es.eigenvalues().reverse();
  const double thresh = rank_tol * std::max(1.0, out.sigma.cwiseAbs().maxCoeff());
  out.rank = (out.sigma.cwiseAbs().array() > thresh).count();
  return out;
}

// Thin SVD truncated to numerical rank: sigma_i > rank_tol * max(1, sigma_1).
struct SvdDecomp {
  Eigen::MatrixXd U;      // d1 x r
  Eigen::VectorXd sigma;  // positive, nonincreasing, length r
  Eigen::MatrixXd V;      // d2 x r
  Eigen::Index rank = 0;
};

inline SvdDecomp svd(const Eigen::MatrixXd& m, double rank_tol = kDefaultRankTol) {
  require_finite(m, "svd input has non-finite entries");
  SvdDecomp out;
  if (m.size() == 0) {
    out.U.resize(m.rows(), 0);
    out.V.resize(m.cols(), 0);
    out.sigma.resize(0);
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> sv(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = sv.singularValues();
  const double thresh = rank_tol * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > thresh) ++r;
  out.rank = r;
  out.U = sv.matrixU().leftCols(r);
  out.V = sv.matrixV().leftCols(r);
  out.sigma = s.head(r);
  return out;
}

// Moore-Penrose pseudoinverse through the eigendecomposition.
inline SymMatrix pinv(const SymMatrix& m, double rank_tol = kDefaultRankTol) {
  const EigDecomp ed = sym_eig(m, rank_tol);
  const Eigen::Index d = m.dim();
  if (d == 0) return SymMatrix();
  const double thresh = rank_tol * std::max(1.0, ed.sigma.cwiseAbs().maxCoeff());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(ed.sigma(i)) > thresh)
      p += ed.U.col(i) * ed.U.col(i).transpose() / ed.sigma(i);
  }
  return SymMatrix(p);
}

// Orthonormal basis of the numerical null space: eigenvectors with
// |eigenvalue| <= rank_tol * max(1, ||X||_2). Returns d x (d - rank).
inline Eigen::MatrixXd null_space_basis(const SymMatrix& m, double rank_tol = kDefaultRankTol) {
  const EigDecomp ed = sym_eig(m, rank_tol);
  const Eigen::Index d = m.dim();
  if (d == 0) return Eigen::MatrixXd(0, 0);
  const double thresh = rank_tol * std::max(1.0, ed.sigma.cwiseAbs().maxCoeff());
  Eigen::MatrixXd v(d, d - ed.rank);
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(ed.sigma(i)) <= thresh) v.col(c++) = ed.U.col(i);
  }
  return v;
}

// A o B := (A B^T + B A^T)/2. Exactly symmetric by construction.
inline SymMatrix sym_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), Errc::DimensionMismatch,
          "sym_product operands must have equal shapes");
  const Eigen::MatrixXd p = a * b.transpose();
  return SymMatrix(0.5 * (p + p.transpose()));
}

// PSD square root; tolerates eigenvalues down to -rank_tol * (1 + ||X||_2).
inline SymMatrix psd_sqrt(const SymMatrix& m, double rank_tol = kDefaultRankTol) {
  const EigDecomp ed = sym_eig(m, rank_tol);
  const Eigen::Index d = m.dim();
  if (d == 0) return SymMatrix();
  const double spec = ed.sigma.cwiseAbs().maxCoeff();
  require(ed.sigma.minCoeff() >= -rank_tol * (1.0 + spec), Errc::NotPsd,
          "psd_sqrt input has a negative eigenvalue beyond tolerance");
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double lam = std::max(ed.sigma(i), 0.0);
    s += std::sqrt(lam) * ed.U.col(i) * ed.U.col(i).transpose();
  }
  return SymMatrix(s);
}

// svec: column-major lower triangle, off-diagonals scaled by sqrt(2) so that
// ||svec(M)||_2 = ||M||_F. smat is the inverse.
inline Eigen::VectorXd svec(const SymMatrix& m) {
  const Eigen::Index d = m.dim();
  Eigen::VectorXd v(d * (d + 1) / 2);
  Eigen::Index p = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    v(p++) = m(j, j);
    for (Eigen::Index i = j + 1; i < d; ++i) v(p++) = kSqrt2 * m(i, j);
  }
  return v;
}

inline Eigen::Index svec_dim_to_order(Eigen::Index n) {
  const Eigen::Index d = static_cast<Eigen::Index>((std::sqrt(8.0 * static_cast<double>(n) + 1.0) - 1.0) / 2.0 + 0.5);
  require(d * (d + 1) / 2 == n, Errc::BadDimension, "length is not a triangular number");
  return d;
}

inline SymMatrix smat(const Eigen::VectorXd& v) {
  require(v.allFinite(), Errc::NonFinite, "smat input has non-finite entries");
  const Eigen::Index d = svec_dim_to_order(v.size());
  Eigen::MatrixXd m(d, d);
  Eigen::Index p = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    m(j, j) = v(p++);
    for (Eigen::Index i = j + 1; i < d; ++i) {
      const double x = v(p++) / kSqrt2;
      m(i, j) = x;
      m(j, i) = x;
    }
  }
  return SymMatrix(m);
}

// Deterministic RNG helpers. Box-Muller on top of mt19937_64 so that streams
// do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  Eigen::VectorXd gaussian_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Eigen::MatrixXd gaussian_matrix(Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }

  SymMatrix gaussian_symmetric(Eigen::Index d) {
    const Eigen::MatrixXd g = gaussian_matrix(d, d);
    return SymMatrix(0.5 * (g + g.transpose()));
  }

  // Haar-ish orthogonal matrix via QR of a Gaussian, sign-fixed for determinism.
  Eigen::MatrixXd orthogonal(Eigen::Index d) {
    const Eigen::MatrixXd g = gaussian_matrix(d, d);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i)
      if (r(i, i) < 0) q.col(i) = -q.col(i);
    return q;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace sqvar
