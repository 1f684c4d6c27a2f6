#pragma once

// Nuclear-norm regularized problems min_X h(X) + lambda*||X||_* and their
// PSD-block reformulation over Xbar = [W1 X; X^T W2]. Provides the block
// objective as a BcProblem, the 1P certificate on the rectangular variable,
// the lift/projection pair between the two views, the overparametrized
// factorized solver, and an independent proximal-gradient baseline.

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "sqvar/solve.hpp"

namespace sqvar {

struct NnmProblem {
  Eigen::Index d1 = 0;
  Eigen::Index d2 = 0;
  std::function<double(const Eigen::MatrixXd&)> h_eval;
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> h_grad;
  // Bilinear second derivative of h at X in two rectangular directions.
  std::function<double(const Eigen::MatrixXd&, const Eigen::MatrixXd&, const Eigen::MatrixXd&)> h_hess_form;
  double lambda = 1.0;
};

namespace detail {

inline void check_rect(const NnmProblem& p, const Eigen::MatrixXd& x, const char* what) {
  require(x.rows() == p.d1 && x.cols() == p.d2, Errc::DimensionMismatch, what);
  require_finite(x, what);
}

inline double nuclear_norm(const Eigen::MatrixXd& x) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(x).singularValues().sum();
}

}  // namespace detail

// Block objective h(Xbar_12) + (lambda/2) tr(Xbar) on symmetric matrices of
// order d1+d2; minimizing it over the PSD cone solves the nuclear-norm
// problem through the off-diagonal block.
inline BcProblem make_nnm_bc(const NnmProblem& p) {
  require(p.d1 >= 1 && p.d2 >= 1, Errc::BadDimension, "make_nnm_bc: empty block dimensions");
  require(p.lambda > 0.0 && std::isfinite(p.lambda), Errc::NonFinite, "make_nnm_bc: lambda must be positive");
  const Eigen::Index d1 = p.d1, d2 = p.d2, d = d1 + d2;
  BcProblem out;
  out.d = d;
  out.eval = [p, d1, d2](const SymMatrix& x) {
    detail::check_dim(x, d1 + d2, "nnm_bc eval: wrong order");
    return p.h_eval(x.mat().topRightCorner(d1, d2)) + 0.5 * p.lambda * x.mat().trace();
  };
  out.grad = [p, d1, d2, d](const SymMatrix& x) {
    detail::check_dim(x, d, "nnm_bc grad: wrong order");
    const Eigen::MatrixXd g = p.h_grad(x.mat().topRightCorner(d1, d2));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    m.topRightCorner(d1, d2) = 0.5 * g;
    m.bottomLeftCorner(d2, d1) = 0.5 * g.transpose();
    m.diagonal().array() += 0.5 * p.lambda;
    return SymMatrix(m);
  };
  out.hess_form = [p, d1, d2, d](const SymMatrix& x, const SymMatrix& w1, const SymMatrix& w2) {
    detail::check_dim(x, d, "nnm_bc hess: wrong order");
    return p.h_hess_form(x.mat().topRightCorner(d1, d2), w1.mat().topRightCorner(d1, d2),
                         w2.mat().topRightCorner(d1, d2));
  };
  return out;
}

inline BcProblem make_nnm_bc(NnmProblem inner, double lambda) {
  inner.lambda = lambda;
  return make_nnm_bc(inner);
}

struct NuclearBlock {
  double value = 0.0;
  SymMatrix w1;
  SymMatrix w2;
  SymMatrix xbar;
};

// SDP characterization of the nuclear norm: value = sum of singular values,
// achieved by W1 = U Sigma U^T, W2 = V Sigma V^T, with the PSD witness
// Xbar = [W1 X; X^T W2] of trace 2*value.
inline NuclearBlock nuclear_norm_block(const Eigen::MatrixXd& x) {
  require_finite(x, "nuclear_norm_block: non-finite input");
  const Eigen::Index d1 = x.rows(), d2 = x.cols();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sig = svd.singularValues();
  NuclearBlock out;
  out.value = sig.sum();
  out.w1 = SymMatrix(svd.matrixU() * sig.asDiagonal() * svd.matrixU().transpose());
  out.w2 = SymMatrix(svd.matrixV() * sig.asDiagonal() * svd.matrixV().transpose());
  Eigen::MatrixXd xb(d1 + d2, d1 + d2);
  xb.topLeftCorner(d1, d1) = out.w1.mat();
  xb.topRightCorner(d1, d2) = x;
  xb.bottomLeftCorner(d2, d1) = x.transpose();
  xb.bottomRightCorner(d2, d2) = out.w2.mat();
  out.xbar = SymMatrix(xb);
  return out;
}

struct NnmReport {
  bool pass = false;
  std::map<std::string, double> residuals;
  Eigen::Index rank = 0;
};

// First-order certificate for the nuclear-norm problem at X: the scaled
// gradient H = -grad h(X)/lambda must be a subgradient dual, i.e. operator
// norm at most one and aligned with the singular factors of X.
inline NnmReport certify_nnm_1p(const NnmProblem& p, const Eigen::MatrixXd& x,
                                const Tolerances& tols = default_tolerances()) {
  detail::check_rect(p, x, "certify_nnm_1p: wrong matrix shape");
  const Eigen::MatrixXd g = p.h_grad(x);
  require_finite(g, "certify_nnm_1p: non-finite gradient");
  const Eigen::MatrixXd h = -g / p.lambda;
  const double hop = Eigen::JacobiSVD<Eigen::MatrixXd>(h).singularValues()(0);

  const SvdDecomp sx = svd(x, tols.rank);
  double align1 = 0.0, align2 = 0.0;
  if (sx.rank > 0) {
    align1 = (sx.U.transpose() * h - sx.V.transpose()).norm();
    align2 = (sx.V.transpose() * h.transpose() - sx.U.transpose()).norm();
  }
  NnmReport rep;
  rep.rank = sx.rank;
  rep.residuals = {{"opNorm", std::max(0.0, hop - 1.0)}, {"align1", align1}, {"align2", align2}};
  rep.pass = rep.residuals["opNorm"] <= tols.psd * (1.0 + hop) &&
             align1 <= tols.feas * (1.0 + hop) && align2 <= tols.feas * (1.0 + hop);
  return rep;
}

// Lifts a certified 1P of the nuclear-norm problem to a 1P of the PSD-block
// problem via the SDP witness; the block certificate is re-checked before
// returning.
inline SymMatrix lift_nnm_1p(const NnmProblem& p, const Eigen::MatrixXd& x,
                             const Tolerances& tols = default_tolerances()) {
  const NnmReport rep = certify_nnm_1p(p, x, tols);
  require(rep.pass, Errc::NotFirstOrder, "lift_nnm_1p: point fails the rectangular first-order certificate");
  const NuclearBlock nb = nuclear_norm_block(x);
  const CertReport block = certify_bc_1c(make_nnm_bc(p), nb.xbar, tols);
  require(block.first_order.pass, Errc::NotFirstOrder,
          "lift_nnm_1p: lifted block point fails the cone first-order certificate");
  return nb.xbar;
}

struct NnmProjection {
  Eigen::MatrixXd x;
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;
  Eigen::VectorXd sigma;
};

// Reads the rectangular point off a PSD block matrix. At a 1P of the block
// problem the rescaled eigenfactors (sqrt(2) row blocks, halved eigenvalues)
// form an SVD of the recovered X; orthonormality is a property checked in
// tests, not an input requirement.
inline NnmProjection project_nnm(const SymMatrix& xbar, Eigen::Index d1, Eigen::Index d2,
                                 double rank_tol = kDefaultRankTol) {
  require(d1 >= 1 && d2 >= 1 && xbar.dim() == d1 + d2, Errc::DimensionMismatch,
          "project_nnm: block split does not match matrix order");
  const EigDecomp eig = sym_eig(xbar, rank_tol);
  const double scale = std::max(1.0, eig.sigma.size() > 0 ? std::abs(eig.sigma(0)) : 0.0);
  require(eig.sigma.size() == 0 || eig.sigma(eig.sigma.size() - 1) >= -rank_tol * scale, Errc::NotPsd,
          "project_nnm: block matrix is not positive semidefinite");
  NnmProjection out;
  out.x = xbar.mat().topRightCorner(d1, d2);
  out.u = kSqrt2 * eig.U.topRows(d1).leftCols(eig.rank);
  out.v = kSqrt2 * eig.U.bottomRows(d2).leftCols(eig.rank);
  out.sigma = 0.5 * eig.sigma.head(eig.rank);
  return out;
}

struct NnmSolve {
  Eigen::MatrixXd y;
  Eigen::MatrixXd z;
  Eigen::MatrixXd x;
  SolveTrace trace;
  double objective = 0.0;
  NnmReport report;
};

// Overparametrized factor solver: minimizes h(YZ^T) + (lambda/2)(||Y||^2 +
// ||Z||^2) by running the trust-region solver on the block problem with the
// square stacked factor F = [Y; Z], then certifies the rectangular result.
inline NnmSolve solve_nnm_dss(const NnmProblem& p, const Eigen::MatrixXd& y0, const Eigen::MatrixXd& z0,
                              const SolveOptions& opts = {}, const Tolerances& tols = default_tolerances()) {
  const Eigen::Index d = p.d1 + p.d2;
  require(y0.rows() == p.d1 && y0.cols() == d, Errc::BadWidth, "solve_nnm_dss: Y0 must be d1 x (d1+d2)");
  require(z0.rows() == p.d2 && z0.cols() == d, Errc::BadWidth, "solve_nnm_dss: Z0 must be d2 x (d1+d2)");
  Eigen::MatrixXd f0(d, d);
  f0.topRows(p.d1) = y0;
  f0.bottomRows(p.d2) = z0;
  const DssSolve sol = solve_dss(make_nnm_bc(p), f0, opts);
  NnmSolve out;
  out.y = sol.f.topRows(p.d1);
  out.z = sol.f.bottomRows(p.d2);
  out.x = out.y * out.z.transpose();
  out.trace = sol.trace;
  out.objective = p.h_eval(out.x) + p.lambda * detail::nuclear_norm(out.x);
  out.report = certify_nnm_1p(p, out.x, tols);
  return out;
}

inline NnmSolve solve_nnm_dss(const NnmProblem& p, std::uint64_t init_seed, const SolveOptions& opts = {},
                              const Tolerances& tols = default_tolerances()) {
  const Eigen::Index d = p.d1 + p.d2;
  Rng rng(init_seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  return solve_nnm_dss(p, scale * rng.gaussian_matrix(p.d1, d), scale * rng.gaussian_matrix(p.d2, d),
                       opts, tols);
}

struct ProxOptions {
  int max_iter = 50000;
  double lipschitz = 0.0;  // <= 0 enables doubling backtracking from 1
  double tol = 1e-13;      // relative objective-change stop
};

// Singular-value soft thresholding, the prox operator of t*||.||_*.
inline Eigen::MatrixXd shrink_singular(const Eigen::MatrixXd& m, double t) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sig = (svd.singularValues().array() - t).max(0.0);
  return svd.matrixU() * sig.asDiagonal() * svd.matrixV().transpose();
}

// Proximal gradient (ISTA) baseline, independent of the factorized pipeline.
inline Eigen::MatrixXd prox_grad_nnm_oracle(const NnmProblem& p, const Eigen::MatrixXd& x0,
                                            const ProxOptions& popts = {}) {
  detail::check_rect(p, x0, "prox_grad_nnm_oracle: wrong start shape");
  Eigen::MatrixXd x = x0;
  double l = popts.lipschitz > 0.0 ? popts.lipschitz : 1.0;
  const bool backtrack = popts.lipschitz <= 0.0;
  double hx = p.h_eval(x);
  double obj = hx + p.lambda * detail::nuclear_norm(x);
  for (int it = 0; it < popts.max_iter; ++it) {
    const Eigen::MatrixXd g = p.h_grad(x);
    Eigen::MatrixXd xn;
    double hn = 0.0;
    for (;;) {
      xn = shrink_singular(x - g / l, p.lambda / l);
      hn = p.h_eval(xn);
      if (!backtrack) break;
      const Eigen::MatrixXd step = xn - x;
      if (hn <= hx + fdot(g, step) + 0.5 * l * step.squaredNorm() + 1e-15 * (1.0 + std::abs(hx))) break;
      l *= 2.0;
      require(l <= 1e16, Errc::Stalled, "prox_grad_nnm_oracle: backtracking exhausted");
    }
    const double objn = hn + p.lambda * detail::nuclear_norm(xn);
    const bool done = std::abs(obj - objn) <= popts.tol * (1.0 + std::abs(obj));
    x = xn;
    hx = hn;
    obj = objn;
    if (done) return x;
  }
  fail(Errc::Stalled, "prox_grad_nnm_oracle: iteration budget exhausted before the objective settled");
}

// h(X) = 0.5*||X - M||_F^2: the prox solution is soft thresholding of M.
inline NnmProblem make_matrix_fit(const Eigen::MatrixXd& m, double lambda) {
  require_finite(m, "make_matrix_fit: non-finite target");
  auto target = std::make_shared<Eigen::MatrixXd>(m);
  NnmProblem p;
  p.d1 = m.rows();
  p.d2 = m.cols();
  p.lambda = lambda;
  p.h_eval = [target](const Eigen::MatrixXd& x) { return 0.5 * (x - *target).squaredNorm(); };
  p.h_grad = [target](const Eigen::MatrixXd& x) { return Eigen::MatrixXd(x - *target); };
  p.h_hess_form = [](const Eigen::MatrixXd&, const Eigen::MatrixXd& w1, const Eigen::MatrixXd& w2) {
    return fdot(w1, w2);
  };
  return p;
}

struct SensingInstance {
  NnmProblem problem;
  Eigen::MatrixXd a;  // m x (d1*d2), rows are vectorized measurement operators
  Eigen::VectorXd b;
  Eigen::MatrixXd x_planted;
};

// Noiseless Gaussian sensing of a planted unit-Frobenius rank-r matrix:
// h(X) = 0.5*||A vec(X) - b||^2 with A entries N(0, 1/m).
inline SensingInstance make_gaussian_sensing(Eigen::Index d1, Eigen::Index d2, Eigen::Index rank,
                                             Eigen::Index m, std::uint64_t seed, double lambda) {
  require(d1 >= 1 && d2 >= 1 && m >= 1, Errc::BadDimension, "make_gaussian_sensing: empty dimensions");
  require(rank >= 1 && rank <= std::min(d1, d2), Errc::BadDimension, "make_gaussian_sensing: bad planted rank");
  Rng rng(seed);
  SensingInstance inst;
  inst.a = rng.gaussian_matrix(m, d1 * d2) / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXd planted = rng.gaussian_matrix(d1, rank) * rng.gaussian_matrix(d2, rank).transpose();
  planted /= planted.norm();
  inst.x_planted = planted;
  inst.b = inst.a * Eigen::Map<const Eigen::VectorXd>(planted.data(), planted.size());

  auto a_ptr = std::make_shared<Eigen::MatrixXd>(inst.a);
  auto b_ptr = std::make_shared<Eigen::VectorXd>(inst.b);
  inst.problem.d1 = d1;
  inst.problem.d2 = d2;
  inst.problem.lambda = lambda;
  inst.problem.h_eval = [a_ptr, b_ptr](const Eigen::MatrixXd& x) {
    const Eigen::VectorXd r = *a_ptr * Eigen::Map<const Eigen::VectorXd>(x.data(), x.size()) - *b_ptr;
    return 0.5 * r.squaredNorm();
  };
  inst.problem.h_grad = [a_ptr, b_ptr, d1, d2](const Eigen::MatrixXd& x) {
    const Eigen::VectorXd r = *a_ptr * Eigen::Map<const Eigen::VectorXd>(x.data(), x.size()) - *b_ptr;
    const Eigen::VectorXd g = a_ptr->transpose() * r;
    return Eigen::MatrixXd(Eigen::Map<const Eigen::MatrixXd>(g.data(), d1, d2));
  };
  inst.problem.h_hess_form = [a_ptr](const Eigen::MatrixXd&, const Eigen::MatrixXd& w1,
                                     const Eigen::MatrixXd& w2) {
    const Eigen::VectorXd aw1 = *a_ptr * Eigen::Map<const Eigen::VectorXd>(w1.data(), w1.size());
    const Eigen::VectorXd aw2 = *a_ptr * Eigen::Map<const Eigen::VectorXd>(w2.data(), w2.size());
    return aw1.dot(aw2);
  };
  return inst;
}

}  // namespace sqvar
