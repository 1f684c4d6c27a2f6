#pragma once

// Second-order local solvers for the factorized problems: a trust-region
// Newton engine with exact dense Hessians and eigensolve-based termination,
// an augmented Lagrangian outer loop for the equality-factorized program, and
// a randomized local-minimality sampler.
//
// Termination declares second-order stationarity only after eigensolving the
// exact Hessian. Decisive negative curvature is escaped by backtracking along
// the bottom eigenvector; an inconclusive curvature band (within 10x of the
// curvature tolerance) triggers a single seeded perturbation of norm
// 10 * gradTol before the point is accepted, which may raise the objective by
// that order.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "sqvar/certify.hpp"

namespace sqvar {

enum class Termination { FirstOrder, SecondOrder, MaxIter, Stalled };

inline const char* termination_name(Termination t) {
  switch (t) {
    case Termination::FirstOrder: return "FirstOrder";
    case Termination::SecondOrder: return "SecondOrder";
    case Termination::MaxIter: return "MaxIter";
    case Termination::Stalled: return "Stalled";
  }
  return "Unknown";
}

struct IterRecord {
  double objective = 0.0;
  double grad_norm = 0.0;
  double min_curv = 0.0;
  double radius = 0.0;
};

struct SolveTrace {
  std::vector<IterRecord> iterates;
  Termination termination = Termination::MaxIter;
};

struct AuglagParams {
  double rho_init = 1.0;
  double rho_growth = 4.0;
  int dual_step_count = 30;
  double inner_tol = 1e-10;
};

struct SolveOptions {
  int max_iter = 400;
  // Relative gradient target; 1e-8 is about the floor a quartic-flat valley
  // allows before objective decrements drop under double resolution.
  double grad_tol = 1e-8;
  double curv_tol = 1e-6;
  double initial_radius = 1.0;
  std::uint64_t seed = 0;
  AuglagParams auglag;
};

namespace detail {

struct Model {
  Eigen::Index dim = 0;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess;
};

// Exact trust-region subproblem through the eigendecomposition of H
// (eigenvalues ascending), including the hard case.
inline Eigen::VectorXd tr_step(const Eigen::VectorXd& d, const Eigen::MatrixXd& q,
                               const Eigen::VectorXd& g, double radius) {
  const Eigen::Index m = d.size();
  const Eigen::VectorXd ghat = q.transpose() * g;
  const double lam1 = d(0);
  if (lam1 > 0.0) {
    const Eigen::VectorXd p = -(ghat.array() / d.array());
    if (p.norm() <= radius) return q * p;
  }
  const double mu_lo = std::max(0.0, -lam1);
  const double eps_den = 1e-14 * std::max(1.0, std::abs(lam1));
  double pseudo_sq = 0.0;
  double bottom_overlap = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double den = d(i) + mu_lo;
    if (den > eps_den)
      pseudo_sq += (ghat(i) / den) * (ghat(i) / den);
    else
      bottom_overlap = std::max(bottom_overlap, std::abs(ghat(i)));
  }
  // The hard case needs the gradient to vanish on the bottom eigenspace;
  // otherwise ||p(mu)|| blows up at mu_lo and the boundary root is interior.
  if (bottom_overlap <= 1e-12 * (1.0 + ghat.norm()) && std::sqrt(pseudo_sq) < radius) {
    // Hard case: fill the remaining length along the bottom eigenvector.
    Eigen::VectorXd p = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double den = d(i) + mu_lo;
      if (den > eps_den) p(i) = -ghat(i) / den;
    }
    p(0) += std::sqrt(std::max(0.0, radius * radius - pseudo_sq));
    return q * p;
  }
  double lo = mu_lo, hi = mu_lo + ghat.norm() / radius + 1.0;
  auto norm_at = [&](double mu) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double den = d(i) + mu;
      acc += (ghat(i) / den) * (ghat(i) / den);
    }
    return std::sqrt(acc);
  };
  while (norm_at(hi) > radius) hi = 2.0 * hi + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (norm_at(mid) > radius ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  Eigen::VectorXd p(m);
  for (Eigen::Index i = 0; i < m; ++i) p(i) = -ghat(i) / (d(i) + mu);
  return q * p;
}

struct TrOutcome {
  Eigen::VectorXd v;
  Termination termination = Termination::MaxIter;
};

inline TrOutcome trust_region_minimize(const Model& model, Eigen::VectorXd v, const SolveOptions& opts,
                                       Rng& rng, SolveTrace& trace) {
  double radius = opts.initial_radius;
  bool perturbed = false;
  double f = model.value(v);
  require(std::isfinite(f), Errc::NonFinite, "solver started at a non-finite objective");
  for (int it = 0; it < opts.max_iter; ++it) {
    const Eigen::VectorXd g = model.grad(v);
    require(g.allFinite(), Errc::NonFinite, "solver gradient is non-finite");
    const Eigen::MatrixXd h = model.hess(v);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXd& d = es.eigenvalues();
    const double lam1 = d(0);
    const double spec = std::max(std::abs(d(0)), std::abs(d(d.size() - 1)));
    trace.iterates.push_back({f, g.norm(), lam1, radius});

    if (g.norm() <= opts.grad_tol * (1.0 + std::abs(f))) {
      if (lam1 >= -opts.curv_tol * (1.0 + spec)) return {v, Termination::SecondOrder};
      if (lam1 < -10.0 * opts.curv_tol * (1.0 + spec)) {
        // Decisive negative curvature: backtrack along the bottom eigenvector.
        const Eigen::VectorXd dir = es.eigenvectors().col(0);
        double t = std::max(radius, 1.0);
        bool moved = false;
        for (int bt = 0; bt < 60 && !moved; ++bt, t *= 0.5) {
          for (const double sgn : {1.0, -1.0}) {
            const double fnew = model.value(v + sgn * t * dir);
            if (std::isfinite(fnew) && fnew < f) {
              v += sgn * t * dir;
              f = fnew;
              moved = true;
              break;
            }
          }
        }
        if (!moved) return {v, Termination::Stalled};
        continue;
      }
      // Inconclusive band: one seeded nudge, then accept what we find.
      if (!perturbed) {
        Eigen::VectorXd nudge = rng.gaussian_vector(model.dim);
        nudge *= 10.0 * opts.grad_tol / std::max(nudge.norm(), 1e-300);
        v += nudge;
        f = model.value(v);
        perturbed = true;
        continue;
      }
      return {v, Termination::SecondOrder};
    }

    const Eigen::VectorXd p = tr_step(d, es.eigenvectors(), g, radius);
    const double mdec = -(g.dot(p) + 0.5 * p.dot(h * p));
    const double fnew = model.value(v + p);
    if (std::isfinite(fnew) && fnew < f && mdec > 0.0) {
      const double ratio = (f - fnew) / mdec;
      v += p;
      f = fnew;
      if (ratio > 0.75 && p.norm() >= 0.8 * radius)
        radius = std::min(2.0 * radius, 1e10);
      else if (ratio < 0.25)
        radius *= 0.25;
    } else {
      radius *= 0.25;
      if (radius < 1e-13 * (1.0 + v.norm())) return {v, Termination::Stalled};
    }
  }
  return {v, Termination::MaxIter};
}

}  // namespace detail

struct DssSolve {
  Factor f;
  SolveTrace trace;
  double objective = 0.0;
};

inline DssSolve solve_dss(const BcProblem& prob, const Factor& f0, const SolveOptions& opts = {}) {
  require_finite(f0, "solve_dss: start factor has non-finite entries");
  require(f0.rows() == prob.d, Errc::DimensionMismatch, "solve_dss: factor rows differ from problem order");
  const Eigen::Index d = f0.rows(), k = f0.cols();
  require(k >= 1 && k <= d, Errc::BadWidth, "solve_dss: factor width must satisfy 1 <= k <= d");

  auto unpack = [d, k](const Eigen::VectorXd& v) {
    return Eigen::MatrixXd(Eigen::Map<const Eigen::MatrixXd>(v.data(), d, k));
  };
  detail::Model model;
  model.dim = d * k;
  model.value = [&prob, unpack](const Eigen::VectorXd& v) {
    const Eigen::MatrixXd f = unpack(v);
    return prob.eval(SymMatrix(f * f.transpose()));
  };
  model.grad = [&prob, unpack](const Eigen::VectorXd& v) {
    const Eigen::MatrixXd f = unpack(v);
    const Eigen::MatrixXd g = 2.0 * prob.grad(SymMatrix(f * f.transpose())).mat() * f;
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(g.data(), g.size()));
  };
  model.hess = [&prob, unpack, d, k](const Eigen::VectorXd& v) {
    const Eigen::MatrixXd f = unpack(v);
    const SymMatrix x(f * f.transpose());
    const SymMatrix g = prob.grad(x);
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
    Eigen::MatrixXd h(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i; j < m; ++j) {
        const Eigen::Index ai = i % d, bi = i / d, aj = j % d, bj = j / d;
        double val = prob.hess_form(x, w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(j)]);
        if (bi == bj) val += 2.0 * g(ai, aj);
        h(i, j) = val;
        h(j, i) = val;
      }
    }
    return h;
  };

  Rng rng(opts.seed);
  DssSolve out;
  const Eigen::VectorXd v0 = Eigen::Map<const Eigen::VectorXd>(f0.data(), f0.size());
  auto res = detail::trust_region_minimize(model, v0, opts, rng, out.trace);
  out.trace.termination = res.termination;
  out.f = unpack(res.v);
  out.objective = model.value(res.v);
  return out;
}

struct DssSymSolve {
  SymMatrix f;
  SolveTrace trace;
  double objective = 0.0;
};

inline DssSymSolve solve_dss_sym(const BcProblem& prob, const SymMatrix& f0, const SolveOptions& opts = {}) {
  detail::check_dim(f0, prob.d, "solve_dss_sym: factor order differs from problem");
  const Eigen::Index d = prob.d;
  const std::vector<SymMatrix> basis = detail::sym_basis(d);
  detail::Model model;
  model.dim = d * (d + 1) / 2;
  model.value = [&prob](const Eigen::VectorXd& v) {
    const SymMatrix f = smat(v);
    return prob.eval(SymMatrix(f.mat() * f.mat()));
  };
  model.grad = [&prob](const Eigen::VectorXd& v) {
    const SymMatrix f = smat(v);
    const SymMatrix g = prob.grad(SymMatrix(f.mat() * f.mat()));
    return svec(SymMatrix(g.mat() * f.mat() + f.mat() * g.mat()));
  };
  model.hess = [&prob, &basis, d](const Eigen::VectorXd& v) {
    const SymMatrix f = smat(v);
    const SymMatrix x(f.mat() * f.mat());
    const SymMatrix g = prob.grad(x);
    const Eigen::Index m = static_cast<Eigen::Index>(basis.size());
    std::vector<SymMatrix> w(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const Eigen::MatrixXd fe = f.mat() * basis[i].mat();
      w[i] = SymMatrix(fe + fe.transpose());
    }
    Eigen::MatrixXd h(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i; j < m; ++j) {
        const auto& di = basis[static_cast<std::size_t>(i)].mat();
        const auto& dj = basis[static_cast<std::size_t>(j)].mat();
        const double val =
            prob.hess_form(x, w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(j)]) +
            fdot(g.mat(), di * dj + dj * di);
        h(i, j) = val;
        h(j, i) = val;
      }
    }
    return h;
  };

  Rng rng(opts.seed);
  DssSymSolve out;
  auto res = detail::trust_region_minimize(model, svec(f0), opts, rng, out.trace);
  out.trace.termination = res.termination;
  out.f = smat(res.v);
  out.objective = model.value(res.v);
  return out;
}

struct SsvSolve {
  Eigen::VectorXd x;
  Factor f;
  Multiplier lambda;
  SolveTrace trace;
  double objective = 0.0;
};

// Augmented Lagrangian on f(x) - <Lambda, C(x) - F F^T> + (rho/2)||C(x) - F F^T||^2
// with the exact first-order dual update and geometric penalty growth capped at
// 1e12 whenever feasibility fails to halve. Success is declared by the
// equality-factorized certificate at the updated multiplier.
inline SsvSolve solve_ssv_auglag(const NsdpProblem& prob, const Eigen::VectorXd& x0, const Factor& f0,
                                 const SolveOptions& opts = {},
                                 const Tolerances& tols = default_tolerances()) {
  require(x0.size() == prob.n, Errc::DimensionMismatch, "solve_ssv_auglag: wrong decision length");
  require_finite(f0, "solve_ssv_auglag: start factor has non-finite entries");
  require(f0.rows() == prob.d && f0.cols() == prob.d, Errc::BadWidth,
          "solve_ssv_auglag: factor must be d x d");
  const Eigen::Index n = prob.n, d = prob.d;
  const Eigen::Index dim = n + d * d;

  auto unpack_x = [n](const Eigen::VectorXd& v) { return Eigen::VectorXd(v.head(n)); };
  auto unpack_f = [n, d](const Eigen::VectorXd& v) {
    return Eigen::MatrixXd(Eigen::Map<const Eigen::MatrixXd>(v.data() + n, d, d));
  };

  SsvSolve out;
  out.lambda = SymMatrix::Zero(d);
  double rho = opts.auglag.rho_init;
  Eigen::VectorXd v(dim);
  v.head(n) = x0;
  Eigen::Map<Eigen::MatrixXd>(v.data() + n, d, d) = f0;
  double viol_prev = std::numeric_limits<double>::infinity();
  out.trace.termination = Termination::MaxIter;

  for (int outer = 0; outer < opts.auglag.dual_step_count; ++outer) {
    const SymMatrix lam = out.lambda;
    detail::Model model;
    model.dim = dim;
    auto residual = [&prob, unpack_x, unpack_f](const Eigen::VectorXd& vv) {
      const Eigen::MatrixXd f = unpack_f(vv);
      return Eigen::MatrixXd(prob.C_eval(unpack_x(vv)).mat() - f * f.transpose());
    };
    model.value = [&prob, lam, rho, unpack_x, residual](const Eigen::VectorXd& vv) {
      const Eigen::MatrixXd r = residual(vv);
      return prob.f_eval(unpack_x(vv)) - fdot(lam.mat(), r) + 0.5 * rho * r.squaredNorm();
    };
    model.grad = [&prob, lam, rho, n, d, unpack_x, unpack_f, residual](const Eigen::VectorXd& vv) {
      const Eigen::VectorXd x = unpack_x(vv);
      const Eigen::MatrixXd f = unpack_f(vv);
      const Eigen::MatrixXd r = residual(vv);
      const SymMatrix lt(lam.mat() - rho * r);
      Eigen::VectorXd g(n + d * d);
      g.head(n) = prob.f_grad(x) - prob.dC_adj(x, lt);
      Eigen::Map<Eigen::MatrixXd>(g.data() + n, d, d) = 2.0 * lt.mat() * f;
      return g;
    };
    model.hess = [&prob, lam, rho, n, d, dim, unpack_x, unpack_f, residual](const Eigen::VectorXd& vv) {
      const Eigen::VectorXd x = unpack_x(vv);
      const Eigen::MatrixXd f = unpack_f(vv);
      const Eigen::MatrixXd r = residual(vv);
      const SymMatrix lt(lam.mat() - rho * r);
      std::vector<Eigen::MatrixXd> dirs(static_cast<std::size_t>(dim));
      for (Eigen::Index j = 0; j < n; ++j) dirs[static_cast<std::size_t>(j)] = prob.dC(x, Eigen::VectorXd::Unit(n, j)).mat();
      for (Eigen::Index b = 0; b < d; ++b) {
        for (Eigen::Index a = 0; a < d; ++a) {
          Eigen::MatrixXd wm = Eigen::MatrixXd::Zero(d, d);
          wm.col(a) -= f.col(b);
          wm.row(a) -= f.col(b).transpose();
          dirs[static_cast<std::size_t>(n + b * d + a)] = wm;
        }
      }
      Eigen::MatrixXd h(dim, dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = i; j < dim; ++j) {
          double val = rho * fdot(dirs[static_cast<std::size_t>(i)], dirs[static_cast<std::size_t>(j)]);
          if (i < n && j < n) {
            val += prob.f_hess_form(x, Eigen::VectorXd::Unit(n, i), Eigen::VectorXd::Unit(n, j)) -
                   fdot(lt.mat(), prob.d2C_form(x, Eigen::VectorXd::Unit(n, i), Eigen::VectorXd::Unit(n, j)).mat());
          } else if (i >= n && j >= n) {
            const Eigen::Index ai = (i - n) % d, bi = (i - n) / d;
            const Eigen::Index aj = (j - n) % d, bj = (j - n) / d;
            if (bi == bj) val += 2.0 * lt(ai, aj);
          }
          h(i, j) = val;
          h(j, i) = val;
        }
      }
      return h;
    };

    Rng rng(opts.seed + static_cast<std::uint64_t>(outer) * 7919u + 1u);
    auto res = detail::trust_region_minimize(model, v, opts, rng, out.trace);
    v = res.v;
    const Eigen::VectorXd x = unpack_x(v);
    const Eigen::MatrixXd f = unpack_f(v);
    const Eigen::MatrixXd r = prob.C_eval(x).mat() - f * f.transpose();
    const double viol = r.norm();
    out.lambda = SymMatrix(out.lambda.mat() - rho * r);

    const CertReport rep = certify_ssv(prob, x, f, out.lambda, tols);
    if (rep.pass(2)) {
      out.trace.termination = Termination::SecondOrder;
      break;
    }
    if (outer + 1 == opts.auglag.dual_step_count) {
      out.trace.termination = rep.pass(1) ? Termination::FirstOrder : Termination::MaxIter;
      break;
    }
    if (viol > 0.5 * viol_prev) rho = std::min(rho * opts.auglag.rho_growth, 1e12);
    viol_prev = viol;
  }

  out.x = unpack_x(v);
  out.f = unpack_f(v);
  out.objective = prob.f_eval(out.x);
  return out;
}

struct LocalCheckResult {
  double min_gap = 0.0;
  Eigen::VectorXd arg_min;
};

// Uniform samples in the radius ball around the point; reports the worst
// objective gap and where it occurred. Deterministic for a fixed seed.
inline LocalCheckResult sample_local_check(const std::function<double(const Eigen::VectorXd&)>& objective,
                                           const Eigen::VectorXd& point, double radius, int trials,
                                           std::uint64_t seed) {
  require(trials >= 1, Errc::BadDimension, "sample_local_check: need at least one trial");
  require(radius > 0.0 && std::isfinite(radius), Errc::BadDimension, "sample_local_check: bad radius");
  Rng rng(seed);
  const double base = objective(point);
  const Eigen::Index dim = point.size();
  LocalCheckResult out;
  out.min_gap = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd dir = rng.gaussian_vector(dim);
    const double nrm = std::max(dir.norm(), 1e-300);
    const double scale = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
    const Eigen::VectorXd cand = point + (scale / nrm) * dir;
    const double gap = objective(cand) - base;
    if (gap < out.min_gap) {
      out.min_gap = gap;
      out.arg_min = cand;
    }
  }
  return out;
}

}  // namespace sqvar
