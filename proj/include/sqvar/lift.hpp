#pragma once

// Constructive liftings between cone-form directions and factor-space
// directions: spectral factorization of a PSD matrix, the masked direction
// construction for square factors, its divisor-based symmetric counterpart,
// and the trace gap that controls the transfer of curvature.

#include <optional>
#include <vector>

#include "sqvar/matcore.hpp"

namespace sqvar {

// F with F F^T = X: scaled eigenvectors padded with zero columns to width k,
// optionally rotated on the right by an orthogonal Q.
inline Factor factor_any(const SymMatrix& x, Eigen::Index k,
                         const std::optional<Eigen::MatrixXd>& rotate = std::nullopt,
                         double rank_tol = kDefaultRankTol) {
  const Eigen::Index d = x.dim();
  require(k >= 1 && k <= d, Errc::BadWidth, "factor_any: width must satisfy 1 <= k <= d");
  const EigDecomp ed = sym_eig(x, rank_tol);
  const double spec = d > 0 ? ed.sigma.cwiseAbs().maxCoeff() : 0.0;
  const double thresh = rank_tol * std::max(1.0, spec);
  require(d == 0 || ed.sigma.minCoeff() >= -rank_tol * (1.0 + spec), Errc::NotPsd,
          "factor_any: input is not PSD within tolerance");
  std::vector<Eigen::Index> pos;
  for (Eigen::Index i = 0; i < d; ++i)
    if (ed.sigma(i) > thresh) pos.push_back(i);
  const Eigen::Index r = static_cast<Eigen::Index>(pos.size());
  require(r <= k, Errc::BadWidth, "factor_any: width is below the numerical rank");
  Factor f = Eigen::MatrixXd::Zero(d, k);
  for (Eigen::Index i = 0; i < r; ++i) f.col(i) = std::sqrt(ed.sigma(pos[i])) * ed.U.col(pos[i]);
  if (rotate) {
    require(rotate->rows() == k && rotate->cols() == k, Errc::DimensionMismatch,
            "factor_any: rotation must be k x k");
    require((rotate->transpose() * (*rotate) - Eigen::MatrixXd::Identity(k, k)).norm() <= 1e-8 * k,
            Errc::BadDimension, "factor_any: rotation is not orthogonal");
    f *= *rotate;
  }
  return f;
}

// Direction lifting for a square factor F (d x k) and a tangent W with
// V_X^T W V_X = 0: Delta = U (L .* (U^T W U)) U^T pinv(F)^T where L halves the
// leading r x r block. Satisfies F Delta^T + Delta F^T = W and kills the
// second trace term against any S with S X = 0.
inline Factor construct_delta(const Factor& f, const SymMatrix& w, double rank_tol = kDefaultRankTol,
                              double sub_tol = kDefaultSubTol) {
  require_finite(f, "construct_delta: factor has non-finite entries");
  const Eigen::Index d = f.rows(), k = f.cols();
  require(k >= 1 && k <= d, Errc::BadWidth, "construct_delta: factor width must satisfy 1 <= k <= d");
  require(w.dim() == d, Errc::DimensionMismatch, "construct_delta: direction order mismatch");
  Eigen::JacobiSVD<Eigen::MatrixXd> sv(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = sv.singularValues();
  const double thresh = rank_tol * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > thresh) ++r;
  const Eigen::MatrixXd& u = sv.matrixU();

  const Eigen::MatrixXd v_null = u.rightCols(d - r);
  require((v_null.transpose() * w.mat() * v_null).norm() <= sub_tol * (1.0 + w.norm()),
          Errc::SubspaceViolation, "construct_delta: direction leaves the tangent subspace");

  Eigen::MatrixXd masked = u.transpose() * w.mat() * u;
  masked.topLeftCorner(r, r) *= 0.5;
  // Only the first r columns survive against pinv(F)^T = U diag(1/sigma) V^T.
  Eigen::MatrixXd core = masked.leftCols(r);
  for (Eigen::Index j = 0; j < r; ++j) core.col(j) /= s(j);
  return u * core * sv.matrixV().leftCols(r).transpose();
}

// Symmetric counterpart: with F = U diag(sigma) U^T reordered so the nonzero
// eigenvalues come first, Delta = U D U^T where D_ij = [U^T W U]_ij /
// (sigma_i + sigma_j) when i or j indexes a nonzero eigenvalue and 0 otherwise.
// Any divisor within the rank cutoff of zero voids the construction.
inline SymMatrix construct_delta_sym(const SymMatrix& f, const SymMatrix& w,
                                     double rank_tol = kDefaultRankTol, double sub_tol = kDefaultSubTol) {
  const Eigen::Index d = f.dim();
  require(w.dim() == d, Errc::DimensionMismatch, "construct_delta_sym: direction order mismatch");
  const EigDecomp ed = sym_eig(f, rank_tol);
  const double thresh = rank_tol * std::max(1.0, d > 0 ? ed.sigma.cwiseAbs().maxCoeff() : 0.0);
  std::vector<Eigen::Index> order;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < d; ++i)
    if (std::abs(ed.sigma(i)) > thresh) order.push_back(i);
  r = static_cast<Eigen::Index>(order.size());
  for (Eigen::Index i = 0; i < d; ++i)
    if (std::abs(ed.sigma(i)) <= thresh) order.push_back(i);

  Eigen::MatrixXd u(d, d);
  Eigen::VectorXd sig(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    u.col(i) = ed.U.col(order[static_cast<std::size_t>(i)]);
    sig(i) = ed.sigma(order[static_cast<std::size_t>(i)]);
  }

  const Eigen::MatrixXd v_null = u.rightCols(d - r);
  require((v_null.transpose() * w.mat() * v_null).norm() <= sub_tol * (1.0 + w.norm()),
          Errc::SubspaceViolation, "construct_delta_sym: direction leaves the tangent subspace");

  const Eigen::MatrixXd wt = u.transpose() * w.mat() * u;
  Eigen::MatrixXd dbar = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i >= r && j >= r) continue;
      const double div = sig(i) + sig(j);
      require(std::abs(div) > thresh, Errc::EigenvalueConditionViolated,
              "construct_delta_sym: eigenvalue pair sums to zero within tolerance");
      dbar(i, j) = wt(i, j) / div;
    }
  }
  return SymMatrix(u * (0.5 * (dbar + dbar.transpose())) * u.transpose());
}

// tr(S (Delta Delta^T - W X^+ W)) with X = F F^T and W = F Delta^T + Delta F^T.
// Nonnegative whenever S is PSD with S F = 0; both hypotheses are reported,
// not enforced, so violations can be probed.
struct LemmaGap {
  double gap = 0.0;
  double sf_residual = 0.0;
  double s_min_eig = 0.0;
};

inline LemmaGap lemma_t2_gap(const SymMatrix& s, const Factor& f, const Factor& delta,
                             double rank_tol = kDefaultRankTol) {
  require_finite(f, "lemma_t2_gap: factor has non-finite entries");
  require_finite(delta, "lemma_t2_gap: direction has non-finite entries");
  require(s.dim() == f.rows(), Errc::DimensionMismatch, "lemma_t2_gap: order mismatch");
  require(f.rows() == delta.rows() && f.cols() == delta.cols(), Errc::DimensionMismatch,
          "lemma_t2_gap: factor and direction shapes differ");
  const SymMatrix x(f * f.transpose());
  const Eigen::MatrixXd fd = f * delta.transpose();
  const Eigen::MatrixXd w = fd + fd.transpose();
  const SymMatrix px = pinv(x, rank_tol);
  LemmaGap out;
  out.gap = fdot(s.mat(), delta * delta.transpose() - w * px.mat() * w);
  out.sf_residual = (s.mat() * f).norm();
  out.s_min_eig = s.dim() > 0 ? sym_eig(s, rank_tol).sigma.minCoeff() : 0.0;
  return out;
}

}  // namespace sqvar
