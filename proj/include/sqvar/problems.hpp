#pragma once

// Problem envelopes and built-in families. A BcProblem is h: S^d -> R with
// gradient and Hessian bilinear form; an NsdpProblem is f: R^n -> R with a
// matrix-valued constraint map C, its differential, adjoint, and curvature.

#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "sqvar/matcore.hpp"

namespace sqvar {

struct BcProblem {
  Eigen::Index d = 0;
  std::function<double(const SymMatrix&)> eval;
  std::function<SymMatrix(const SymMatrix&)> grad;
  // (X, W1, W2) -> D^2 h_X[W1, W2]; symmetric and bilinear in (W1, W2).
  std::function<double(const SymMatrix&, const SymMatrix&, const SymMatrix&)> hess_form;
};

struct NsdpProblem {
  Eigen::Index n = 0;  // decision vector length
  Eigen::Index d = 0;  // constraint block order
  std::function<double(const Eigen::VectorXd&)> f_eval;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> f_grad;
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&)> f_hess_form;
  std::function<SymMatrix(const Eigen::VectorXd&)> C_eval;
  std::function<SymMatrix(const Eigen::VectorXd&, const Eigen::VectorXd&)> dC;          // DC_x[z]
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const SymMatrix&)> dC_adj;      // DC_x^*(L)
  std::function<SymMatrix(const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&)> d2C_form;
};

namespace detail {
inline void check_dim(const SymMatrix& x, Eigen::Index d, const char* what) {
  require(x.dim() == d, Errc::DimensionMismatch, what);
}
}  // namespace detail

// h(X) = <A, X^2> + <B, X>.
inline BcProblem make_quadratic_square(const SymMatrix& a, const SymMatrix& b) {
  require(a.dim() == b.dim(), Errc::DimensionMismatch, "quadratic_square: A and B orders differ");
  BcProblem p;
  p.d = a.dim();
  const Eigen::Index d = p.d;
  p.eval = [a, b, d](const SymMatrix& x) {
    detail::check_dim(x, d, "quadratic_square eval: wrong order");
    return fdot(a.mat(), x.mat() * x.mat()) + fdot(b.mat(), x.mat());
  };
  p.grad = [a, b, d](const SymMatrix& x) {
    detail::check_dim(x, d, "quadratic_square grad: wrong order");
    const Eigen::MatrixXd m = a.mat() * x.mat();
    return SymMatrix(m + m.transpose() + b.mat());
  };
  p.hess_form = [a, d](const SymMatrix& x, const SymMatrix& w1, const SymMatrix& w2) {
    detail::check_dim(x, d, "quadratic_square hess: wrong order");
    return fdot(a.mat(), w1.mat() * w2.mat() + w2.mat() * w1.mat());
  };
  return p;
}

// h(X) = <A, X .* X> + <B, X> with the entrywise (Hadamard) square.
inline BcProblem make_quadratic_hadamard(const SymMatrix& a, const SymMatrix& b) {
  require(a.dim() == b.dim(), Errc::DimensionMismatch, "quadratic_hadamard: A and B orders differ");
  BcProblem p;
  p.d = a.dim();
  const Eigen::Index d = p.d;
  p.eval = [a, b, d](const SymMatrix& x) {
    detail::check_dim(x, d, "quadratic_hadamard eval: wrong order");
    return (a.mat().array() * x.mat().array().square()).sum() + fdot(b.mat(), x.mat());
  };
  p.grad = [a, b, d](const SymMatrix& x) {
    detail::check_dim(x, d, "quadratic_hadamard grad: wrong order");
    return SymMatrix(2.0 * (a.mat().array() * x.mat().array()).matrix() + b.mat());
  };
  p.hess_form = [a, d](const SymMatrix& x, const SymMatrix& w1, const SymMatrix& w2) {
    detail::check_dim(x, d, "quadratic_hadamard hess: wrong order");
    return 2.0 * (a.mat().array() * w1.mat().array() * w2.mat().array()).sum();
  };
  return p;
}

// h(X) = (1/2) sum_i (<A_i, X> - b_i)^2.
inline BcProblem make_least_squares(std::vector<SymMatrix> a_list, Eigen::VectorXd b) {
  require(!a_list.empty(), Errc::BadDimension, "least_squares: empty measurement list");
  require(static_cast<Eigen::Index>(a_list.size()) == b.size(), Errc::DimensionMismatch,
          "least_squares: measurement count mismatch");
  const Eigen::Index d = a_list.front().dim();
  for (const auto& a : a_list)
    require(a.dim() == d, Errc::DimensionMismatch, "least_squares: inconsistent measurement orders");
  require(b.allFinite(), Errc::NonFinite, "least_squares: b has non-finite entries");
  auto shared = std::make_shared<std::pair<std::vector<SymMatrix>, Eigen::VectorXd>>(std::move(a_list), std::move(b));
  BcProblem p;
  p.d = d;
  p.eval = [shared, d](const SymMatrix& x) {
    detail::check_dim(x, d, "least_squares eval: wrong order");
    double acc = 0.0;
    for (std::size_t i = 0; i < shared->first.size(); ++i) {
      const double r = fdot(shared->first[i].mat(), x.mat()) - shared->second(static_cast<Eigen::Index>(i));
      acc += r * r;
    }
    return 0.5 * acc;
  };
  p.grad = [shared, d](const SymMatrix& x) {
    detail::check_dim(x, d, "least_squares grad: wrong order");
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < shared->first.size(); ++i) {
      const double r = fdot(shared->first[i].mat(), x.mat()) - shared->second(static_cast<Eigen::Index>(i));
      g += r * shared->first[i].mat();
    }
    return SymMatrix(g);
  };
  p.hess_form = [shared, d](const SymMatrix& x, const SymMatrix& w1, const SymMatrix& w2) {
    detail::check_dim(x, d, "least_squares hess: wrong order");
    double acc = 0.0;
    for (const auto& a : shared->first) acc += fdot(a.mat(), w1.mat()) * fdot(a.mat(), w2.mat());
    return acc;
  };
  return p;
}

// Least-squares factorization instance with a certified rank-k factor F_k that
// is second-order stationary for the width-k factorized problem yet not a
// global minimizer, and the true solution X_star of value zero.
struct Example21 {
  BcProblem problem;
  std::vector<SymMatrix> a_list;
  Eigen::VectorXd b;
  Factor f_k;          // d x k, = eta * [I_k; 0]
  SymMatrix x_star;    // (5(d-1)/3) e_d e_d^T
  double epsilon = 0.0;
  double eta = 0.0;
  double value_at_f_k = 0.0;  // 5(d-1)^2 / (12k)
};

inline Example21 make_example_2_1(Eigen::Index d, Eigen::Index k) {
  require(d >= 3, Errc::BadDimension, "example_2_1 needs d >= 3");
  require(k >= 1 && k <= d, Errc::BadWidth, "example_2_1 needs 1 <= k <= d");
  Example21 ex;
  ex.epsilon = 0.5 * std::sqrt(6.0 / static_cast<double>(k));
  ex.eta = std::sqrt(static_cast<double>(d - 1) / static_cast<double>(k));
  const double beta = 5.0 * static_cast<double>(d - 1) / 3.0;

  ex.a_list.reserve(static_cast<std::size_t>(d + 1));
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    a(i, d - 1) = 1.0;
    a(d - 1, i) = 1.0;
    ex.a_list.emplace_back(a);
  }
  ex.a_list.emplace_back(Eigen::MatrixXd(ex.epsilon * Eigen::MatrixXd::Identity(d, d)));
  {
    Eigen::VectorXd diag = 2.0 * Eigen::VectorXd::Ones(d);
    diag(d - 1) = 1.0;
    ex.a_list.emplace_back(Eigen::MatrixXd(ex.epsilon * diag.asDiagonal()));
  }
  ex.b = Eigen::VectorXd::Zero(d + 1);
  ex.b(d - 1) = ex.epsilon * beta;
  ex.b(d) = ex.epsilon * beta;

  ex.f_k = Eigen::MatrixXd::Zero(d, k);
  ex.f_k.topRows(k) = ex.eta * Eigen::MatrixXd::Identity(k, k);

  Eigen::MatrixXd xs = Eigen::MatrixXd::Zero(d, d);
  xs(d - 1, d - 1) = beta;
  ex.x_star = SymMatrix(xs);

  ex.value_at_f_k = 5.0 * static_cast<double>((d - 1) * (d - 1)) / (12.0 * static_cast<double>(k));
  ex.problem = make_least_squares(ex.a_list, ex.b);
  return ex;
}

// Scalar NSDP with no Lagrange multiplier at x = 0 even though the matching
// squared-variable triple is second-order stationary there:
// f(x) = (x+1)^2/2, C(x) = [[x^2+1, x], [x, x^2+1]].
inline NsdpProblem make_example_3_1() {
  NsdpProblem p;
  p.n = 1;
  p.d = 2;
  auto check_x = [](const Eigen::VectorXd& x) {
    require(x.size() == 1, Errc::DimensionMismatch, "example_3_1: x must be a scalar");
    require(x.allFinite(), Errc::NonFinite, "example_3_1: non-finite x");
  };
  p.f_eval = [check_x](const Eigen::VectorXd& x) {
    check_x(x);
    return 0.5 * (x(0) + 1.0) * (x(0) + 1.0);
  };
  p.f_grad = [check_x](const Eigen::VectorXd& x) {
    check_x(x);
    Eigen::VectorXd g(1);
    g(0) = x(0) + 1.0;
    return g;
  };
  p.f_hess_form = [check_x](const Eigen::VectorXd& x, const Eigen::VectorXd& z1, const Eigen::VectorXd& z2) {
    check_x(x);
    return z1(0) * z2(0);
  };
  p.C_eval = [check_x](const Eigen::VectorXd& x) {
    check_x(x);
    Eigen::MatrixXd c(2, 2);
    c << x(0) * x(0) + 1.0, x(0), x(0), x(0) * x(0) + 1.0;
    return SymMatrix(c);
  };
  p.dC = [check_x](const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
    check_x(x);
    Eigen::MatrixXd m(2, 2);
    m << 2.0 * x(0) * z(0), z(0), z(0), 2.0 * x(0) * z(0);
    return SymMatrix(m);
  };
  p.dC_adj = [check_x](const Eigen::VectorXd& x, const SymMatrix& lam) {
    check_x(x);
    Eigen::VectorXd v(1);
    v(0) = 2.0 * x(0) * (lam(0, 0) + lam(1, 1)) + 2.0 * lam(0, 1);
    return v;
  };
  p.d2C_form = [check_x](const Eigen::VectorXd& x, const Eigen::VectorXd& z1, const Eigen::VectorXd& z2) {
    check_x(x);
    return SymMatrix(Eigen::MatrixXd(2.0 * z1(0) * z2(0) * Eigen::MatrixXd::Identity(2, 2)));
  };
  return p;
}

// Central-difference validation of the analytic derivatives. Errors are
// |fd - analytic| / (1 + max(|fd|, |analytic|)), worst case over directions.
struct FdReport {
  double worst_grad_rel_err = 0.0;
  double worst_hess_rel_err = 0.0;
  double worst_adjoint_err = 0.0;  // NSDP only; exact identity, no differencing
};

namespace detail {
inline double rel_gap(double a, double b) {
  return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b)));
}
}  // namespace detail

inline FdReport fd_check_derivatives(const BcProblem& p, const SymMatrix& x, double step,
                                     int num_dirs = 20, std::uint64_t seed = 9001) {
  FdReport rep;
  Rng rng(seed);
  const SymMatrix g = p.grad(x);
  for (int t = 0; t < num_dirs; ++t) {
    SymMatrix w = rng.gaussian_symmetric(p.d);
    w = SymMatrix(w.mat() / w.norm());
    const SymMatrix xp(x.mat() + step * w.mat());
    const SymMatrix xm(x.mat() - step * w.mat());
    const double fd = (p.eval(xp) - p.eval(xm)) / (2.0 * step);
    rep.worst_grad_rel_err = std::max(rep.worst_grad_rel_err, detail::rel_gap(fd, fdot(g.mat(), w.mat())));

    SymMatrix w2 = rng.gaussian_symmetric(p.d);
    w2 = SymMatrix(w2.mat() / w2.norm());
    const SymMatrix xp2(x.mat() + step * w2.mat());
    const SymMatrix xm2(x.mat() - step * w2.mat());
    const double fd_h = fdot((p.grad(xp2).mat() - p.grad(xm2).mat()) / (2.0 * step), w.mat());
    rep.worst_hess_rel_err = std::max(rep.worst_hess_rel_err, detail::rel_gap(fd_h, p.hess_form(x, w, w2)));
  }
  return rep;
}

inline FdReport fd_check_derivatives(const NsdpProblem& p, const Eigen::VectorXd& x, double step,
                                     int num_dirs = 20, std::uint64_t seed = 9002) {
  FdReport rep;
  Rng rng(seed);
  const Eigen::VectorXd g = p.f_grad(x);
  for (int t = 0; t < num_dirs; ++t) {
    Eigen::VectorXd z = rng.gaussian_vector(p.n);
    z /= z.norm();
    const double fd = (p.f_eval(x + step * z) - p.f_eval(x - step * z)) / (2.0 * step);
    rep.worst_grad_rel_err = std::max(rep.worst_grad_rel_err, detail::rel_gap(fd, g.dot(z)));

    Eigen::VectorXd z2 = rng.gaussian_vector(p.n);
    z2 /= z2.norm();
    const double fd_h = (p.f_grad(x + step * z2) - p.f_grad(x - step * z2)).dot(z) / (2.0 * step);
    rep.worst_hess_rel_err = std::max(rep.worst_hess_rel_err, detail::rel_gap(fd_h, p.f_hess_form(x, z, z2)));

    // Constraint map derivative against differences of C itself.
    const Eigen::MatrixXd fd_c = (p.C_eval(x + step * z).mat() - p.C_eval(x - step * z).mat()) / (2.0 * step);
    const Eigen::MatrixXd an_c = p.dC(x, z).mat();
    rep.worst_grad_rel_err =
        std::max(rep.worst_grad_rel_err, (fd_c - an_c).norm() / (1.0 + std::max(fd_c.norm(), an_c.norm())));

    const Eigen::MatrixXd fd_c2 = (p.dC(x + step * z2, z).mat() - p.dC(x - step * z2, z).mat()) / (2.0 * step);
    const Eigen::MatrixXd an_c2 = p.d2C_form(x, z, z2).mat();
    rep.worst_hess_rel_err =
        std::max(rep.worst_hess_rel_err, (fd_c2 - an_c2).norm() / (1.0 + std::max(fd_c2.norm(), an_c2.norm())));

    // <DC_x[z], L> = <z, DC_x^*(L)> must hold to rounding.
    const SymMatrix lam = rng.gaussian_symmetric(p.d);
    const double lhs = fdot(p.dC(x, z).mat(), lam.mat());
    const double rhs = z.dot(p.dC_adj(x, lam));
    rep.worst_adjoint_err = std::max(rep.worst_adjoint_err, detail::rel_gap(lhs, rhs));
  }
  return rep;
}

}  // namespace sqvar
