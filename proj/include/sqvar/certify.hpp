#pragma once

// First- and second-order optimality certificates for the PSD-constrained
// problem, its factorized forms (square and symmetric factors), and the
// nonlinear semidefinite program with its squared-variable reformulations.
// Second-order checks assemble the reduced quadratic form over an orthonormal
// basis of the relevant subspace and eigensolve it; a refutation carries the
// minimizing direction as a witness.

#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqvar/problems.hpp"

namespace sqvar {

struct Tolerances {
  double feas = 1e-8;
  double psd = 1e-8;
  double curv = 1e-6;
  double rank = 1e-9;
};

// Library defaults; SQVAR_RANK_TOL overrides the rank cutoff when set to a
// positive finite value.
inline Tolerances default_tolerances() {
  Tolerances t;
  if (const char* env = std::getenv("SQVAR_RANK_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && std::isfinite(v) && v > 0.0) t.rank = v;
  }
  return t;
}

struct Witness {
  Eigen::VectorXd z;      // empty unless the formulation has a vector block
  Eigen::MatrixXd delta;  // W for the cone form, Delta for factorized forms
};

struct FirstOrderReport {
  bool pass = false;
  std::map<std::string, double> residuals;
};

struct SecondOrderReport {
  bool evaluated = false;
  bool pass = false;
  double lambda_min = 0.0;
  Eigen::Index subspace_dim = 0;
  std::optional<Witness> witness;  // set when refuted
};

struct CertReport {
  std::string formulation;
  FirstOrderReport first_order;
  SecondOrderReport second_order;
  Tolerances tolerances;

  bool pass(int order = 2) const {
    if (!first_order.pass) return false;
    if (order <= 1) return true;
    return second_order.evaluated && second_order.pass;
  }
};

namespace detail {

// Positive/null eigenspace split of a PSD-within-tolerance matrix. Eigenvalues
// below the rank cutoff (including slightly negative ones) go to the null
// block; the pseudoinverse uses the positive block only.
struct PsdSplit {
  Eigen::MatrixXd u_pos;   // d x r
  Eigen::VectorXd sig_pos; // length r, positive
  Eigen::MatrixXd u_null;  // d x (d - r)
  Eigen::MatrixXd pinv;    // d x d
};

inline PsdSplit psd_split(const SymMatrix& x, double rank_tol) {
  const EigDecomp ed = sym_eig(x, rank_tol);
  const Eigen::Index d = x.dim();
  const double spec = d > 0 ? ed.sigma.cwiseAbs().maxCoeff() : 0.0;
  const double thresh = rank_tol * std::max(1.0, spec);
  std::vector<Eigen::Index> pos, nul;
  for (Eigen::Index i = 0; i < d; ++i) (ed.sigma(i) > thresh ? pos : nul).push_back(i);
  PsdSplit s;
  s.u_pos.resize(d, static_cast<Eigen::Index>(pos.size()));
  s.sig_pos.resize(static_cast<Eigen::Index>(pos.size()));
  s.u_null.resize(d, static_cast<Eigen::Index>(nul.size()));
  for (std::size_t i = 0; i < pos.size(); ++i) {
    s.u_pos.col(static_cast<Eigen::Index>(i)) = ed.U.col(pos[i]);
    s.sig_pos(static_cast<Eigen::Index>(i)) = ed.sigma(pos[i]);
  }
  for (std::size_t i = 0; i < nul.size(); ++i) s.u_null.col(static_cast<Eigen::Index>(i)) = ed.U.col(nul[i]);
  s.pinv = s.u_pos * s.sig_pos.cwiseInverse().asDiagonal() * s.u_pos.transpose();
  return s;
}

// svec-ordered orthonormal basis of S^d.
inline std::vector<SymMatrix> sym_basis(Eigen::Index d) {
  std::vector<SymMatrix> out;
  out.reserve(static_cast<std::size_t>(d * (d + 1) / 2));
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = j; i < d; ++i) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(d, d);
      if (i == j) {
        e(i, i) = 1.0;
      } else {
        e(i, j) = 1.0 / kSqrt2;
        e(j, i) = 1.0 / kSqrt2;
      }
      out.emplace_back(e);
    }
  }
  return out;
}

// Orthonormal basis of {W : V^T W V = 0} given orthonormal U (range) and V
// (null space) blocks: W = U A U^T + U B V^T + V B^T U^T.
inline std::vector<SymMatrix> bc_tangent_basis(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
  const Eigen::Index r = u.cols(), s = v.cols();
  std::vector<SymMatrix> out;
  out.reserve(static_cast<std::size_t>(r * (r + 1) / 2 + r * s));
  for (Eigen::Index j = 0; j < r; ++j) {
    out.emplace_back(Eigen::MatrixXd(u.col(j) * u.col(j).transpose()));
    for (Eigen::Index i = j + 1; i < r; ++i) {
      const Eigen::MatrixXd e = (u.col(i) * u.col(j).transpose() + u.col(j) * u.col(i).transpose()) / kSqrt2;
      out.emplace_back(e);
    }
  }
  for (Eigen::Index c = 0; c < s; ++c) {
    for (Eigen::Index j = 0; j < r; ++j) {
      const Eigen::MatrixXd e = (u.col(j) * v.col(c).transpose() + v.col(c) * u.col(j).transpose()) / kSqrt2;
      out.emplace_back(e);
    }
  }
  return out;
}

// Orthonormal basis (columns) of ker(M) for a q x p matrix.
inline Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, double rank_tol) {
  const Eigen::Index p = m.cols();
  if (m.rows() == 0 || m.norm() == 0.0) return Eigen::MatrixXd::Identity(p, p);
  Eigen::JacobiSVD<Eigen::MatrixXd> sv(m, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = sv.singularValues();
  const double thresh = rank_tol * std::max(1.0, s(0));
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > thresh) ++r;
  return sv.matrixV().rightCols(p - r);
}

template <class Bilinear, class WitnessFn>
SecondOrderReport reduced_second_order(Eigen::Index m, const Tolerances& tols, Bilinear&& bil,
                                       WitnessFn&& mk_witness) {
  SecondOrderReport so;
  so.evaluated = true;
  so.subspace_dim = m;
  if (m == 0) {
    so.pass = true;
    return so;
  }
  Eigen::MatrixXd h(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const double v = bil(i, j);
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  require(h.allFinite(), Errc::NonFinite, "reduced quadratic form has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  so.lambda_min = es.eigenvalues()(0);
  const double spec = es.eigenvalues().cwiseAbs().maxCoeff();
  so.pass = so.lambda_min >= -tols.curv * (1.0 + spec);
  if (!so.pass) so.witness = mk_witness(es.eigenvectors().col(0));
  return so;
}

}  // namespace detail

// Quadratic forms evaluated directly from the problem callbacks. These are the
// reference definitions; the certifiers assemble the same forms over bases.

inline double bc_quadratic_form(const BcProblem& p, const SymMatrix& x, const SymMatrix& w,
                                double rank_tol = kDefaultRankTol) {
  const SymMatrix g = p.grad(x);
  const detail::PsdSplit split = detail::psd_split(x, rank_tol);
  return p.hess_form(x, w, w) + 2.0 * fdot(w.mat() * split.pinv * w.mat(), g.mat());
}

inline double dss_quadratic_form(const BcProblem& p, const Factor& f, const Factor& delta) {
  const SymMatrix x(f * f.transpose());
  const SymMatrix g = p.grad(x);
  const Eigen::MatrixXd fd = f * delta.transpose();
  const SymMatrix w(fd + fd.transpose());
  return p.hess_form(x, w, w) + 2.0 * fdot(g.mat(), delta * delta.transpose());
}

inline double dss_sym_quadratic_form(const BcProblem& p, const SymMatrix& f, const SymMatrix& delta) {
  const SymMatrix x(f.mat() * f.mat());
  const SymMatrix g = p.grad(x);
  const SymMatrix w(f.mat() * delta.mat() + delta.mat() * f.mat());
  return p.hess_form(x, w, w) + 2.0 * fdot(g.mat(), delta.mat() * delta.mat());
}

inline double nsdp_quadratic_form(const NsdpProblem& p, const Eigen::VectorXd& x, const Multiplier& lam,
                                  const Eigen::VectorXd& z, double rank_tol = kDefaultRankTol) {
  const SymMatrix c = p.C_eval(x);
  const detail::PsdSplit split = detail::psd_split(c, rank_tol);
  const Eigen::MatrixXd dc = p.dC(x, z).mat();
  return p.f_hess_form(x, z, z) - fdot(lam.mat(), p.d2C_form(x, z, z).mat()) +
         2.0 * fdot(dc * split.pinv * dc, lam.mat());
}

inline double ssv_quadratic_form(const NsdpProblem& p, const Eigen::VectorXd& x, const Multiplier& lam,
                                 const Eigen::VectorXd& z, const Eigen::MatrixXd& delta) {
  return p.f_hess_form(x, z, z) - fdot(lam.mat(), p.d2C_form(x, z, z).mat()) +
         2.0 * fdot(lam.mat(), delta * delta.transpose());
}

inline double ssv_sym_quadratic_form(const NsdpProblem& p, const Eigen::VectorXd& x, const Multiplier& lam,
                                     const Eigen::VectorXd& z, const SymMatrix& delta) {
  return ssv_quadratic_form(p, x, lam, z, delta.mat());
}

// X >= 0, grad h(X) >= 0, grad h(X) X = 0.
inline CertReport certify_bc_1c(const BcProblem& p, const SymMatrix& x,
                                const Tolerances& tols = default_tolerances()) {
  detail::check_dim(x, p.d, "certify_bc: point order differs from problem");
  CertReport rep;
  rep.formulation = "bc";
  rep.tolerances = tols;
  const SymMatrix g = p.grad(x);
  const double lam_x = p.d > 0 ? sym_eig(x, tols.rank).sigma.minCoeff() : 0.0;
  const double lam_g = p.d > 0 ? sym_eig(g, tols.rank).sigma.minCoeff() : 0.0;
  const double feas = std::max(0.0, -lam_x);
  const double dual = std::max(0.0, -lam_g);
  const double compl_res = (g.mat() * x.mat()).norm();
  const double scale = 1.0 + x.norm() + g.norm();
  rep.first_order.residuals = {{"feas", feas}, {"dual_psd", dual}, {"compl", compl_res}};
  rep.first_order.pass =
      feas <= tols.feas * scale && dual <= tols.psd * scale && compl_res <= tols.feas * scale;
  return rep;
}

// Adds the reduced-curvature check over {W : V_X^T W V_X = 0}.
inline CertReport certify_bc_2nc(const BcProblem& p, const SymMatrix& x,
                                 const Tolerances& tols = default_tolerances()) {
  CertReport rep = certify_bc_1c(p, x, tols);
  if (!rep.first_order.pass) return rep;
  const detail::PsdSplit split = detail::psd_split(x, tols.rank);
  const std::vector<SymMatrix> basis = detail::bc_tangent_basis(split.u_pos, split.u_null);
  const SymMatrix g = p.grad(x);
  const Eigen::Index m = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::MatrixXd> bp(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) bp[i] = basis[i].mat() * split.pinv;
  rep.second_order = detail::reduced_second_order(
      m, tols,
      [&](Eigen::Index i, Eigen::Index j) {
        return p.hess_form(x, basis[i], basis[j]) +
               fdot(bp[i] * basis[j].mat() + bp[j] * basis[i].mat(), g.mat());
      },
      [&](const Eigen::VectorXd& c) {
        Witness w;
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p.d, p.d);
        for (Eigen::Index i = 0; i < m; ++i) acc += c(i) * basis[i].mat();
        w.delta = acc;
        return w;
      });
  return rep;
}

// Stationarity grad h(F F^T) F = 0, then curvature over all of R^{d x k}.
inline CertReport certify_dss(const BcProblem& p, const Factor& f,
                              const Tolerances& tols = default_tolerances()) {
  require_finite(f, "certify_dss: factor has non-finite entries");
  require(f.rows() == p.d, Errc::DimensionMismatch, "certify_dss: factor rows differ from problem order");
  const Eigen::Index d = f.rows(), k = f.cols();
  require(k >= 1 && k <= d, Errc::BadWidth, "certify_dss: factor width must satisfy 1 <= k <= d");
  CertReport rep;
  rep.formulation = "dss";
  rep.tolerances = tols;
  const SymMatrix x(f * f.transpose());
  const SymMatrix g = p.grad(x);
  const double stat = (g.mat() * f).norm();
  const double scale = 1.0 + f.norm() + g.norm();
  rep.first_order.residuals = {{"stationarity", stat}};
  rep.first_order.pass = stat <= tols.feas * scale;
  if (!rep.first_order.pass) return rep;

  const Eigen::Index m = d * k;
  std::vector<SymMatrix> w(static_cast<std::size_t>(m));
  for (Eigen::Index b = 0; b < k; ++b) {
    for (Eigen::Index a = 0; a < d; ++a) {
      Eigen::MatrixXd wm = Eigen::MatrixXd::Zero(d, d);
      wm.col(a) += f.col(b);
      wm.row(a) += f.col(b).transpose();
      w[static_cast<std::size_t>(b * d + a)] = SymMatrix(wm);
    }
  }
  rep.second_order = detail::reduced_second_order(
      m, tols,
      [&](Eigen::Index i, Eigen::Index j) {
        const Eigen::Index ai = i % d, bi = i / d, aj = j % d, bj = j / d;
        const double gterm = bi == bj ? 2.0 * g(ai, aj) : 0.0;
        return p.hess_form(x, w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(j)]) + gterm;
      },
      [&](const Eigen::VectorXd& c) {
        Witness wit;
        wit.delta = Eigen::Map<const Eigen::MatrixXd>(c.data(), d, k);
        return wit;
      });
  return rep;
}

// Symmetric-factor variant: stationarity grad h(F^2) F + F grad h(F^2) = 0,
// curvature over Delta in S^d with W = F Delta + Delta F.
inline CertReport certify_dss_sym(const BcProblem& p, const SymMatrix& f,
                                  const Tolerances& tols = default_tolerances()) {
  detail::check_dim(f, p.d, "certify_dss_sym: factor order differs from problem");
  const Eigen::Index d = f.dim();
  CertReport rep;
  rep.formulation = "dss_sym";
  rep.tolerances = tols;
  const SymMatrix x(f.mat() * f.mat());
  const SymMatrix g = p.grad(x);
  const double stat = (g.mat() * f.mat() + f.mat() * g.mat()).norm();
  const double scale = 1.0 + f.norm() + g.norm();
  rep.first_order.residuals = {{"stationarity", stat}};
  rep.first_order.pass = stat <= tols.feas * scale;
  if (!rep.first_order.pass) return rep;

  const std::vector<SymMatrix> basis = detail::sym_basis(d);
  const Eigen::Index m = static_cast<Eigen::Index>(basis.size());
  std::vector<SymMatrix> w(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Eigen::MatrixXd fe = f.mat() * basis[i].mat();
    w[i] = SymMatrix(fe + fe.transpose());
  }
  rep.second_order = detail::reduced_second_order(
      m, tols,
      [&](Eigen::Index i, Eigen::Index j) {
        const auto& di = basis[static_cast<std::size_t>(i)].mat();
        const auto& dj = basis[static_cast<std::size_t>(j)].mat();
        return p.hess_form(x, w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(j)]) +
               fdot(g.mat(), di * dj + dj * di);
      },
      [&](const Eigen::VectorXd& c) {
        Witness wit;
        wit.delta = smat(c).mat();
        return wit;
      });
  return rep;
}

// KKT residuals for min f(x) s.t. C(x) >= 0 at (x, Lambda).
inline CertReport certify_nsdp_1c(const NsdpProblem& p, const Eigen::VectorXd& x, const Multiplier& lam,
                                  const Tolerances& tols = default_tolerances()) {
  require(x.size() == p.n, Errc::DimensionMismatch, "certify_nsdp: wrong decision length");
  detail::check_dim(lam, p.d, "certify_nsdp: wrong multiplier order");
  CertReport rep;
  rep.formulation = "nsdp";
  rep.tolerances = tols;
  const SymMatrix c = p.C_eval(x);
  const Eigen::VectorXd g = p.f_grad(x);
  const Eigen::VectorXd adj = p.dC_adj(x, lam);
  const double stat = (g - adj).norm();
  const double compl_res = (lam.mat() * c.mat()).norm();
  const double feas = std::max(0.0, -sym_eig(c, tols.rank).sigma.minCoeff());
  const double mult_psd = std::max(0.0, -sym_eig(lam, tols.rank).sigma.minCoeff());
  rep.first_order.residuals = {
      {"stationarity", stat}, {"compl", compl_res}, {"feas", feas}, {"mult_psd", mult_psd}};
  rep.first_order.pass = stat <= tols.feas * (1.0 + g.norm() + adj.norm()) &&
                         compl_res <= tols.feas * (1.0 + lam.norm() * c.norm()) &&
                         feas <= tols.feas * (1.0 + c.norm()) &&
                         mult_psd <= tols.psd * (1.0 + lam.norm());
  return rep;
}

// Reduced curvature over {z : V^T DC_x[z] V = 0} with V spanning ker C(x).
inline CertReport certify_nsdp_2nc(const NsdpProblem& p, const Eigen::VectorXd& x, const Multiplier& lam,
                                   const Tolerances& tols = default_tolerances()) {
  CertReport rep = certify_nsdp_1c(p, x, lam, tols);
  if (!rep.first_order.pass) return rep;
  const SymMatrix c = p.C_eval(x);
  const detail::PsdSplit split = detail::psd_split(c, tols.rank);
  const Eigen::Index s = split.u_null.cols();
  Eigen::MatrixXd z;
  if (s == 0) {
    z = Eigen::MatrixXd::Identity(p.n, p.n);
  } else {
    Eigen::MatrixXd m(s * (s + 1) / 2, p.n);
    for (Eigen::Index j = 0; j < p.n; ++j) {
      const Eigen::MatrixXd dc = p.dC(x, Eigen::VectorXd::Unit(p.n, j)).mat();
      m.col(j) = svec(SymMatrix(split.u_null.transpose() * dc * split.u_null));
    }
    z = detail::kernel_basis(m, tols.rank);
  }
  const Eigen::Index m_dim = z.cols();
  std::vector<SymMatrix> dc_at(static_cast<std::size_t>(m_dim));
  for (Eigen::Index i = 0; i < m_dim; ++i) dc_at[static_cast<std::size_t>(i)] = p.dC(x, z.col(i));
  rep.second_order = detail::reduced_second_order(
      m_dim, tols,
      [&](Eigen::Index i, Eigen::Index j) {
        const auto& di = dc_at[static_cast<std::size_t>(i)].mat();
        const auto& dj = dc_at[static_cast<std::size_t>(j)].mat();
        return p.f_hess_form(x, z.col(i), z.col(j)) -
               fdot(lam.mat(), p.d2C_form(x, z.col(i), z.col(j)).mat()) +
               fdot(di * split.pinv * dj + dj * split.pinv * di, lam.mat());
      },
      [&](const Eigen::VectorXd& c2) {
        Witness wit;
        wit.z = z * c2;
        return wit;
      });
  return rep;
}

// Equality-factorized form: grad f = DC^*(Lambda), Lambda F = 0, C(x) = F F^T;
// curvature over {(z, Delta) : DC_x[z] = F Delta^T + Delta F^T}.
inline CertReport certify_ssv(const NsdpProblem& p, const Eigen::VectorXd& x, const Factor& f,
                              const Multiplier& lam, const Tolerances& tols = default_tolerances()) {
  require(x.size() == p.n, Errc::DimensionMismatch, "certify_ssv: wrong decision length");
  require_finite(f, "certify_ssv: factor has non-finite entries");
  require(f.rows() == p.d && f.cols() == p.d, Errc::BadWidth, "certify_ssv: factor must be d x d");
  detail::check_dim(lam, p.d, "certify_ssv: wrong multiplier order");
  CertReport rep;
  rep.formulation = "ssv";
  rep.tolerances = tols;
  const Eigen::Index d = p.d, n = p.n;
  const SymMatrix c = p.C_eval(x);
  const Eigen::VectorXd g = p.f_grad(x);
  const Eigen::VectorXd adj = p.dC_adj(x, lam);
  const double stat = (g - adj).norm();
  const double compl_f = (lam.mat() * f).norm();
  const double feas_f = (c.mat() - f * f.transpose()).norm();
  rep.first_order.residuals = {{"stationarity", stat}, {"compl_factor", compl_f}, {"factor_feas", feas_f}};
  rep.first_order.pass = stat <= tols.feas * (1.0 + g.norm() + adj.norm()) &&
                         compl_f <= tols.feas * (1.0 + lam.norm() * f.norm()) &&
                         feas_f <= tols.feas * (1.0 + c.norm() + f.squaredNorm());
  if (!rep.first_order.pass) return rep;

  Eigen::MatrixXd m(d * (d + 1) / 2, n + d * d);
  for (Eigen::Index j = 0; j < n; ++j) m.col(j) = svec(p.dC(x, Eigen::VectorXd::Unit(n, j)));
  for (Eigen::Index b = 0; b < d; ++b) {
    for (Eigen::Index a = 0; a < d; ++a) {
      Eigen::MatrixXd wm = Eigen::MatrixXd::Zero(d, d);
      wm.col(a) -= f.col(b);
      wm.row(a) -= f.col(b).transpose();
      m.col(n + b * d + a) = svec(SymMatrix(wm));
    }
  }
  const Eigen::MatrixXd basis = detail::kernel_basis(m, tols.rank);
  const Eigen::Index m_dim = basis.cols();
  std::vector<Eigen::MatrixXd> deltas(static_cast<std::size_t>(m_dim));
  for (Eigen::Index i = 0; i < m_dim; ++i)
    deltas[static_cast<std::size_t>(i)] = Eigen::Map<const Eigen::MatrixXd>(basis.col(i).data() + n, d, d);
  rep.second_order = detail::reduced_second_order(
      m_dim, tols,
      [&](Eigen::Index i, Eigen::Index j) {
        const Eigen::VectorXd zi = basis.col(i).head(n), zj = basis.col(j).head(n);
        const auto& di = deltas[static_cast<std::size_t>(i)];
        const auto& dj = deltas[static_cast<std::size_t>(j)];
        return p.f_hess_form(x, zi, zj) - fdot(lam.mat(), p.d2C_form(x, zi, zj).mat()) +
               fdot(lam.mat(), di * dj.transpose() + dj * di.transpose());
      },
      [&](const Eigen::VectorXd& c2) {
        const Eigen::VectorXd w = basis * c2;
        Witness wit;
        wit.z = w.head(n);
        wit.delta = Eigen::Map<const Eigen::MatrixXd>(w.data() + n, d, d);
        return wit;
      });
  return rep;
}

// Symmetric-factor variant: Lambda o F = 0, C(x) = F^2; curvature over
// {(z, Delta) : Delta in S^d, DC_x[z] = F Delta + Delta F}.
inline CertReport certify_ssv_sym(const NsdpProblem& p, const Eigen::VectorXd& x, const SymMatrix& f,
                                  const Multiplier& lam, const Tolerances& tols = default_tolerances()) {
  require(x.size() == p.n, Errc::DimensionMismatch, "certify_ssv_sym: wrong decision length");
  detail::check_dim(f, p.d, "certify_ssv_sym: wrong factor order");
  detail::check_dim(lam, p.d, "certify_ssv_sym: wrong multiplier order");
  CertReport rep;
  rep.formulation = "ssv_sym";
  rep.tolerances = tols;
  const Eigen::Index d = p.d, n = p.n;
  const SymMatrix c = p.C_eval(x);
  const Eigen::VectorXd g = p.f_grad(x);
  const Eigen::VectorXd adj = p.dC_adj(x, lam);
  const double stat = (g - adj).norm();
  const double compl_f = (0.5 * (lam.mat() * f.mat() + f.mat() * lam.mat())).norm();
  const double feas_f = (c.mat() - f.mat() * f.mat()).norm();
  rep.first_order.residuals = {{"stationarity", stat}, {"compl_factor", compl_f}, {"factor_feas", feas_f}};
  rep.first_order.pass = stat <= tols.feas * (1.0 + g.norm() + adj.norm()) &&
                         compl_f <= tols.feas * (1.0 + lam.norm() * f.norm()) &&
                         feas_f <= tols.feas * (1.0 + c.norm() + f.norm() * f.norm());
  if (!rep.first_order.pass) return rep;

  const std::vector<SymMatrix> sbasis = detail::sym_basis(d);
  const Eigen::Index q = static_cast<Eigen::Index>(sbasis.size());
  Eigen::MatrixXd m(d * (d + 1) / 2, n + q);
  for (Eigen::Index j = 0; j < n; ++j) m.col(j) = svec(p.dC(x, Eigen::VectorXd::Unit(n, j)));
  for (Eigen::Index i = 0; i < q; ++i) {
    const Eigen::MatrixXd fe = f.mat() * sbasis[static_cast<std::size_t>(i)].mat();
    m.col(n + i) = -svec(SymMatrix(fe + fe.transpose()));
  }
  const Eigen::MatrixXd basis = detail::kernel_basis(m, tols.rank);
  const Eigen::Index m_dim = basis.cols();
  std::vector<SymMatrix> deltas(static_cast<std::size_t>(m_dim));
  for (Eigen::Index i = 0; i < m_dim; ++i)
    deltas[static_cast<std::size_t>(i)] = smat(basis.col(i).tail(q));
  rep.second_order = detail::reduced_second_order(
      m_dim, tols,
      [&](Eigen::Index i, Eigen::Index j) {
        const Eigen::VectorXd zi = basis.col(i).head(n), zj = basis.col(j).head(n);
        const auto& di = deltas[static_cast<std::size_t>(i)].mat();
        const auto& dj = deltas[static_cast<std::size_t>(j)].mat();
        return p.f_hess_form(x, zi, zj) - fdot(lam.mat(), p.d2C_form(x, zi, zj).mat()) +
               fdot(lam.mat(), di * dj + dj * di);
      },
      [&](const Eigen::VectorXd& c2) {
        const Eigen::VectorXd w = basis * c2;
        Witness wit;
        wit.z = w.head(n);
        wit.delta = smat(w.tail(q)).mat();
        return wit;
      });
  return rep;
}

// No two nonzero eigenvalues of F may sum to zero. Gate for transferring
// symmetric-factor certificates back to the cone form.
struct EcReport {
  bool pass = true;
  bool has_offender = false;
  Eigen::Index i = -1, j = -1;
  double sigma_i = 0.0, sigma_j = 0.0;
};

inline EcReport check_eigenvalue_condition(const SymMatrix& f, double tol = kDefaultRankTol) {
  EcReport rep;
  const EigDecomp ed = sym_eig(f, tol);
  if (f.dim() == 0) return rep;
  const double thresh = tol * std::max(1.0, ed.sigma.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> nz;
  for (Eigen::Index i = 0; i < f.dim(); ++i)
    if (std::abs(ed.sigma(i)) > thresh) nz.push_back(i);
  for (std::size_t a = 0; a < nz.size() && rep.pass; ++a) {
    for (std::size_t b = a; b < nz.size(); ++b) {
      if (std::abs(ed.sigma(nz[a]) + ed.sigma(nz[b])) <= thresh) {
        rep.pass = false;
        rep.has_offender = true;
        rep.i = nz[a];
        rep.j = nz[b];
        rep.sigma_i = ed.sigma(nz[a]);
        rep.sigma_j = ed.sigma(nz[b]);
        break;
      }
    }
  }
  return rep;
}

struct StrictComplReport {
  bool pass = false;
  Eigen::Index rank_x = 0;
  Eigen::Index rank_multiplier = 0;
  double compl_residual = 0.0;
};

inline StrictComplReport check_strict_complementarity(const SymMatrix& x, const Multiplier& lam,
                                                      double rank_tol = kDefaultRankTol) {
  require(x.dim() == lam.dim(), Errc::DimensionMismatch, "strict complementarity: order mismatch");
  StrictComplReport rep;
  rep.rank_x = sym_eig(x, rank_tol).rank;
  rep.rank_multiplier = sym_eig(lam, rank_tol).rank;
  rep.compl_residual = (lam.mat() * x.mat()).norm();
  rep.pass = rep.rank_x + rep.rank_multiplier == x.dim();
  return rep;
}

// Least-squares multiplier supported on ker C(x): Lambda = V M V^T minimizing
// ||grad f - DC^*(Lambda)||. Minimum-norm solution, no PSD projection; the
// nullity of the recovery map is reported so degenerate fits are visible.
struct RecoveredMultiplier {
  Multiplier lambda;
  double residual = 0.0;
  Eigen::Index nullity = 0;
};

inline RecoveredMultiplier recover_multiplier(const NsdpProblem& p, const Eigen::VectorXd& x,
                                              double rank_tol = kDefaultRankTol) {
  require(x.size() == p.n, Errc::DimensionMismatch, "recover_multiplier: wrong decision length");
  const SymMatrix c = p.C_eval(x);
  const EigDecomp ed = sym_eig(c, rank_tol);
  const double spec = p.d > 0 ? ed.sigma.cwiseAbs().maxCoeff() : 0.0;
  require(p.d == 0 || ed.sigma.minCoeff() >= -rank_tol * (1.0 + spec), Errc::NotFeasible,
          "recover_multiplier: C(x) is not PSD within tolerance");
  const detail::PsdSplit split = detail::psd_split(c, rank_tol);
  const Eigen::VectorXd g = p.f_grad(x);
  RecoveredMultiplier out;
  const Eigen::Index s = split.u_null.cols();
  if (s == 0) {
    out.lambda = SymMatrix::Zero(p.d);
    out.residual = g.norm();
    return out;
  }
  const Eigen::Index q = s * (s + 1) / 2;
  Eigen::MatrixXd map(p.n, q);
  for (Eigen::Index j = 0; j < q; ++j) {
    const SymMatrix basis_j = smat(Eigen::VectorXd::Unit(q, j));
    map.col(j) = p.dC_adj(x, SymMatrix(split.u_null * basis_j.mat() * split.u_null.transpose()));
  }
  const SvdDecomp sv = svd(map, rank_tol);
  const Eigen::VectorXd coeff =
      sv.V * sv.sigma.cwiseInverse().asDiagonal() * (sv.U.transpose() * g);
  out.nullity = q - sv.rank;
  out.residual = (g - map * coeff).norm();
  out.lambda = SymMatrix(split.u_null * smat(coeff).mat() * split.u_null.transpose());
  return out;
}

}  // namespace sqvar
