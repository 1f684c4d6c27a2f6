// Command-line front end. Reports go to stdout as one JSON document with
// floats fixed at 17 significant digits; --out mirrors the same bytes to a
// file, so identical inputs and seeds give byte-identical artifacts.
//
// Exit codes: 0 success / certificate holds, 2 usage or parse error,
// 3 certificate refuted, 4 numerical failure, 5 solver budget exhausted.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sqvar/certify.hpp"
#include "sqvar/io.hpp"
#include "sqvar/lift.hpp"
#include "sqvar/nucnorm.hpp"
#include "sqvar/problems.hpp"
#include "sqvar/solve.hpp"

namespace {

using sqvar::CertReport;
using sqvar::Errc;
using sqvar::Json;
using sqvar::SymMatrix;
using sqvar::Tolerances;

// Tolerance overrides; precedence is flag > SQVAR_RANK_TOL > builtin because
// default_tolerances() already consumed the environment.
struct TolFlags {
  double feas = 0.0, psd = 0.0, curv = 0.0, rank = 0.0;
  CLI::Option* feas_opt = nullptr;
  CLI::Option* psd_opt = nullptr;
  CLI::Option* curv_opt = nullptr;
  CLI::Option* rank_opt = nullptr;

  void attach(CLI::App* cmd) {
    feas_opt = cmd->add_option("--tol-feas", feas, "feasibility/stationarity tolerance");
    psd_opt = cmd->add_option("--tol-psd", psd, "cone residual tolerance");
    curv_opt = cmd->add_option("--tol-curv", curv, "curvature tolerance");
    rank_opt = cmd->add_option("--tol-rank", rank, "numerical rank cutoff");
  }

  Tolerances resolve() const {
    Tolerances t = sqvar::default_tolerances();
    if (feas_opt->count() > 0) t.feas = feas;
    if (psd_opt->count() > 0) t.psd = psd;
    if (curv_opt->count() > 0) t.curv = curv;
    if (rank_opt->count() > 0) t.rank = rank;
    return t;
  }
};

void emit(const Json& j, const std::string& out_path) {
  const std::string text = sqvar::dump_deterministic(j);
  std::cout << text;
  if (!out_path.empty()) sqvar::write_text_file(out_path, text);
}

// Point files carry exactly the keys their role demands; extra or missing
// keys are parse errors rather than guesses.
Eigen::MatrixXd only_matrix(const Json& pt, const char* key) {
  sqvar::detail::check_keys(pt, {key}, "point file");
  return sqvar::matrix_from_json(pt.at(key), key);
}

SymMatrix sym_block(const Json& pt, const char* key) {
  return SymMatrix(sqvar::matrix_from_json(pt.at(key), key));
}

const sqvar::BcProblem& need_bc(const sqvar::LoadedProblem& prob, const std::string& who) {
  if (!prob.bc) sqvar::fail(Errc::Parse, who + " needs a matrix-cone problem family");
  return *prob.bc;
}

const sqvar::NsdpProblem& need_nsdp(const sqvar::LoadedProblem& prob, const std::string& who) {
  if (!prob.nsdp) sqvar::fail(Errc::Parse, who + " needs a matrix-constrained problem family");
  return *prob.nsdp;
}

const sqvar::NnmProblem& need_nnm(const sqvar::LoadedProblem& prob, const std::string& who) {
  if (!prob.nnm) sqvar::fail(Errc::Parse, who + " needs a nuclear-norm problem family");
  return *prob.nnm;
}

int run_certify(const std::string& problem_path, const std::string& point_path,
                const std::string& formulation, int order, bool order_given, const Tolerances& tols,
                const std::string& out_path) {
  const sqvar::LoadedProblem prob = sqvar::load_problem_file(problem_path);
  const Json pt = sqvar::read_json_file(point_path);

  if (formulation == "nnm") {
    if (order_given && order != 1)
      sqvar::fail(Errc::Parse, "certify: formulation nnm only has a first-order certificate");
    const sqvar::NnmProblem& p = need_nnm(prob, "certify nnm");
    const Eigen::MatrixXd x = only_matrix(pt, "X");
    const sqvar::NnmReport rep = sqvar::certify_nnm_1p(p, x, tols);
    emit(sqvar::report_to_json(rep), out_path);
    return rep.pass ? 0 : 3;
  }

  CertReport rep;
  if (formulation == "bc") {
    const SymMatrix x(only_matrix(pt, "X"));
    rep = order == 1 ? certify_bc_1c(need_bc(prob, "certify bc"), x, tols)
                     : certify_bc_2nc(need_bc(prob, "certify bc"), x, tols);
  } else if (formulation == "dss") {
    rep = certify_dss(need_bc(prob, "certify dss"), only_matrix(pt, "F"), tols);
  } else if (formulation == "dss_sym") {
    rep = certify_dss_sym(need_bc(prob, "certify dss_sym"), SymMatrix(only_matrix(pt, "F")), tols);
  } else {
    const sqvar::NsdpProblem& p = need_nsdp(prob, "certify " + formulation);
    if (formulation == "nsdp") {
      sqvar::detail::check_keys(pt, {"x", "Lambda"}, "point file");
      const Eigen::VectorXd x = sqvar::vector_from_json(pt.at("x"), "x");
      const SymMatrix lam = sym_block(pt, "Lambda");
      rep = order == 1 ? certify_nsdp_1c(p, x, lam, tols) : certify_nsdp_2nc(p, x, lam, tols);
    } else {
      sqvar::detail::check_keys(pt, {"x", "F", "Lambda"}, "point file");
      const Eigen::VectorXd x = sqvar::vector_from_json(pt.at("x"), "x");
      const SymMatrix lam = sym_block(pt, "Lambda");
      rep = formulation == "ssv"
                ? certify_ssv(p, x, sqvar::matrix_from_json(pt.at("F"), "F"), lam, tols)
                : certify_ssv_sym(p, x, sym_block(pt, "F"), lam, tols);
    }
  }
  emit(sqvar::report_to_json(rep), out_path);
  return rep.pass(order) ? 0 : 3;
}

int exit_for_termination(sqvar::Termination t) {
  switch (t) {
    case sqvar::Termination::SecondOrder: return 0;
    case sqvar::Termination::FirstOrder: return 3;  // converged, curvature refuted
    default: return 5;
  }
}

int run_solve(const std::string& method, const std::string& problem_path, const std::string& init_path,
              sqvar::SolveOptions opts, Eigen::Index width, const Tolerances& tols,
              const std::string& out_path, const std::string& point_out, const std::string& trace_path) {
  const sqvar::LoadedProblem prob = sqvar::load_problem_file(problem_path);
  opts.curv_tol = tols.curv;

  sqvar::SolveTrace trace;
  double objective = 0.0;
  Json point;       // embedded in the report
  Json cert_point;  // role-named file, feeds straight back into certify
  Json report;

  if (method == "dss") {
    const sqvar::BcProblem& p = need_bc(prob, "solve dss");
    sqvar::Factor f0;
    if (!init_path.empty()) {
      f0 = only_matrix(sqvar::read_json_file(init_path), "F");
      sqvar::require(f0.rows() == p.d && f0.cols() >= 1 && f0.cols() <= p.d, Errc::DimensionMismatch,
                     "solve dss: init factor must be d x k with 1 <= k <= d");
    } else {
      const Eigen::Index w = width > 0 ? width : p.d;
      sqvar::require(w >= 1 && w <= p.d, Errc::Parse, "solve dss: --width must satisfy 1 <= k <= d");
      f0 = sqvar::Rng(opts.seed).gaussian_matrix(p.d, w) / std::sqrt(static_cast<double>(p.d));
    }
    const sqvar::DssSolve sol = solve_dss(p, f0, opts);
    trace = sol.trace;
    objective = sol.objective;
    point = Json{{"F", sqvar::matrix_to_json(sol.f)}};
    cert_point = point;
    report = sqvar::report_to_json(certify_dss(p, sol.f, tols));
  } else if (method == "dss_sym") {
    const sqvar::BcProblem& p = need_bc(prob, "solve dss_sym");
    SymMatrix f0;
    if (!init_path.empty()) {
      f0 = SymMatrix(only_matrix(sqvar::read_json_file(init_path), "F"));
    } else {
      const Eigen::MatrixXd g =
          sqvar::Rng(opts.seed).gaussian_matrix(p.d, p.d) / std::sqrt(static_cast<double>(p.d));
      f0 = SymMatrix(0.5 * (g + g.transpose()));
    }
    const sqvar::DssSymSolve sol = solve_dss_sym(p, f0, opts);
    trace = sol.trace;
    objective = sol.objective;
    point = Json{{"F", sqvar::matrix_to_json(sol.f.mat())}};
    cert_point = point;
    report = sqvar::report_to_json(certify_dss_sym(p, sol.f, tols));
  } else if (method == "ssv_auglag") {
    const sqvar::NsdpProblem& p = need_nsdp(prob, "solve ssv_auglag");
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(p.n);
    sqvar::Factor f0 = Eigen::MatrixXd::Identity(p.d, p.d);
    if (!init_path.empty()) {
      const Json init = sqvar::read_json_file(init_path);
      sqvar::detail::check_keys(init, {"x", "F"}, "init file");
      x0 = sqvar::vector_from_json(init.at("x"), "x");
      f0 = sqvar::matrix_from_json(init.at("F"), "F");
    }
    const sqvar::SsvSolve sol = solve_ssv_auglag(p, x0, f0, opts, tols);
    trace = sol.trace;
    objective = sol.objective;
    point = Json{{"x", sqvar::vector_to_json(sol.x)},
                 {"F", sqvar::matrix_to_json(sol.f)},
                 {"Lambda", sqvar::matrix_to_json(sol.lambda.mat())}};
    cert_point = point;
    report = sqvar::report_to_json(certify_ssv(p, sol.x, sol.f, sol.lambda, tols));
  } else {  // nnm_dss
    const sqvar::NnmProblem& p = need_nnm(prob, "solve nnm_dss");
    sqvar::NnmSolve sol;
    if (!init_path.empty()) {
      const Json init = sqvar::read_json_file(init_path);
      sqvar::detail::check_keys(init, {"Y", "Z"}, "init file");
      sol = solve_nnm_dss(p, sqvar::matrix_from_json(init.at("Y"), "Y"),
                          sqvar::matrix_from_json(init.at("Z"), "Z"), opts, tols);
    } else {
      sol = solve_nnm_dss(p, opts.seed, opts, tols);
    }
    trace = sol.trace;
    objective = sol.objective;
    point = Json{{"Y", sqvar::matrix_to_json(sol.y)},
                 {"Z", sqvar::matrix_to_json(sol.z)},
                 {"X", sqvar::matrix_to_json(sol.x)}};
    cert_point = Json{{"X", sqvar::matrix_to_json(sol.x)}};
    report = sqvar::report_to_json(sol.report);
  }

  emit(Json{{"method", method},
            {"objective", objective},
            {"termination", sqvar::termination_name(trace.termination)},
            {"point", point},
            {"report", report}},
       out_path);
  if (!point_out.empty()) sqvar::write_text_file(point_out, sqvar::dump_deterministic(cert_point));
  if (!trace_path.empty()) sqvar::write_text_file(trace_path, sqvar::trace_to_json_lines(trace));
  return exit_for_termination(trace.termination);
}

int run_lift(const std::string& mode, const std::string& problem_path, const std::string& point_path,
             Eigen::Index width, Eigen::Index d1, Eigen::Index d2, const Tolerances& tols,
             const std::string& out_path) {
  const Json pt = sqvar::read_json_file(point_path);
  if (mode == "factor") {
    const SymMatrix x(only_matrix(pt, "X"));
    const Eigen::Index k = width > 0 ? width : x.dim();
    emit(Json{{"F", sqvar::matrix_to_json(sqvar::factor_any(x, k, std::nullopt, tols.rank))}}, out_path);
    return 0;
  }
  if (mode == "nnm_1p") {
    if (problem_path.empty()) sqvar::fail(Errc::Parse, "lift nnm_1p: --problem is required");
    const sqvar::LoadedProblem prob = sqvar::load_problem_file(problem_path);
    const sqvar::NnmProblem& p = need_nnm(prob, "lift nnm_1p");
    const SymMatrix xbar = lift_nnm_1p(p, only_matrix(pt, "X"), tols);
    emit(Json{{"X", sqvar::matrix_to_json(xbar.mat())}}, out_path);
    return 0;
  }
  // project: split a block point back into rectangular data
  sqvar::require(d1 >= 1 && d2 >= 1, Errc::Parse, "lift project: --d1 and --d2 are required");
  const sqvar::NnmProjection pr = project_nnm(SymMatrix(only_matrix(pt, "X")), d1, d2, tols.rank);
  emit(Json{{"X", sqvar::matrix_to_json(pr.x)},
            {"U", sqvar::matrix_to_json(pr.u)},
            {"V", sqvar::matrix_to_json(pr.v)},
            {"sigma", sqvar::vector_to_json(pr.sigma)}},
       out_path);
  return 0;
}

// --- reproduce: scripted end-to-end checks of the four worked examples ---

struct Claims {
  Json map = Json::object();
  bool all = true;

  void add(const std::string& name, bool pass, Json extra = Json::object()) {
    extra["pass"] = pass;
    map[name] = extra;
    all = all && pass;
  }
};

int finish(const std::string& example, Claims& cl, const std::string& out_path) {
  emit(Json{{"example", example}, {"claims", cl.map}, {"pass", cl.all}}, out_path);
  return cl.all ? 0 : 3;
}

int reproduce_ex21(Eigen::Index d, Eigen::Index k, std::uint64_t seed, const Tolerances& tols,
                   const std::string& out_path) {
  const sqvar::Example21 ex = sqvar::make_example_2_1(d, k);
  Claims cl;

  const double value = ex.problem.eval(SymMatrix(ex.f_k * ex.f_k.transpose()));
  cl.add("value_at_f_k", std::abs(value - ex.value_at_f_k) <= 1e-10 * (1.0 + std::abs(value)),
         Json{{"value", value}, {"expected", ex.value_at_f_k}});

  if (k < d) {
    const CertReport rep = certify_dss(ex.problem, ex.f_k, tols);
    cl.add("f_k_second_order", rep.pass(2), Json{{"lambda_min", rep.second_order.lambda_min}});
  } else {
    // at full width the ladder stops being stationary; the saddle is gone
    const CertReport rep = certify_dss(ex.problem, ex.f_k, tols);
    cl.add("full_width_ladder_not_stationary", !rep.first_order.pass,
           Json{{"stationarity", rep.first_order.residuals.at("stationarity")}});
  }

  const double at_star = ex.problem.eval(ex.x_star);
  cl.add("x_star_zero_objective", std::abs(at_star) <= 1e-10, Json{{"value", at_star}});
  cl.add("x_star_second_order", certify_bc_2nc(ex.problem, ex.x_star, tols).pass(2));

  // full-width runs land at the global value; a couple of seeds cover bad luck
  sqvar::SolveOptions opts;
  double best = std::numeric_limits<double>::infinity();
  int tried = 0;
  for (std::uint64_t s = seed; s < seed + 5 && best > 1e-8; ++s) {
    opts.seed = s;
    const sqvar::Factor f0 =
        sqvar::Rng(s).gaussian_matrix(d, d) / std::sqrt(static_cast<double>(d));
    best = std::min(best, solve_dss(ex.problem, f0, opts).objective);
    ++tried;
  }
  cl.add("full_width_solve", best <= 1e-8, Json{{"objective", best}, {"seeds_tried", tried}});

  return finish("ex2.1", cl, out_path);
}

int reproduce_ex22(const Tolerances& tols, const std::string& out_path) {
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 0.5, -1.0, -1.0, 0.5;
  b << -1.0, 2.0, 2.0, -1.0;
  const sqvar::BcProblem p = make_quadratic_square(SymMatrix(a), SymMatrix(b));
  const SymMatrix eye = SymMatrix::Identity(2);
  Claims cl;

  cl.add("identity_first_order", certify_bc_1c(p, eye, tols).pass(1));

  const CertReport at_eye = certify_bc_2nc(p, eye, tols);
  cl.add("identity_not_second_order",
         !at_eye.pass(2) && std::abs(at_eye.second_order.lambda_min - (-1.0)) <= 1e-8,
         Json{{"lambda_min", at_eye.second_order.lambda_min}});

  Eigen::MatrixXd root(2, 2);
  root << 1.0, 0.0, 0.0, -1.0;
  cl.add("indefinite_root_second_order", certify_dss_sym(p, SymMatrix(root), tols).pass(2));
  cl.add("identity_root_refuted", !certify_dss_sym(p, eye, tols).pass(2));

  const sqvar::EcReport ec = check_eigenvalue_condition(SymMatrix(root), tols.rank);
  cl.add("eigenvalue_condition_blocks_transfer", !ec.pass && ec.has_offender,
         Json{{"sigma_i", ec.sigma_i}, {"sigma_j", ec.sigma_j}});

  return finish("ex2.2", cl, out_path);
}

int reproduce_ex31(const Tolerances& tols, const std::string& out_path) {
  const sqvar::NsdpProblem p = sqvar::make_example_3_1();
  Eigen::VectorXd origin(1), interior(1);
  origin << 0.0;
  interior << -1.0;
  Eigen::MatrixXd root(2, 2), offdiag(2, 2);
  root << 1.0, 0.0, 0.0, -1.0;
  offdiag << 0.0, 0.5, 0.5, 0.0;
  const SymMatrix f(root);
  const sqvar::Multiplier lam(offdiag);
  Claims cl;

  cl.add("symmetric_triple_second_order", certify_ssv_sym(p, origin, f, lam, tols).pass(2));

  const CertReport square = certify_ssv(p, origin, root, lam, tols);
  cl.add("square_variant_not_stationary", !square.first_order.pass,
         Json{{"compl_factor", square.first_order.residuals.at("compl_factor")}});

  const sqvar::RecoveredMultiplier rec = recover_multiplier(p, origin, tols.rank);
  cl.add("multiplier_residual_at_origin", std::abs(rec.residual - 1.0) <= 1e-12,
         Json{{"residual", rec.residual}});

  cl.add("interior_minimum_second_order",
         certify_nsdp_2nc(p, interior, sqvar::Multiplier(SymMatrix::Zero(2)), tols).pass(2));

  return finish("ex3.1", cl, out_path);
}

int reproduce_exb1(std::uint64_t seed, const Tolerances& tols, const std::string& out_path) {
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 10.0, 5.0, 5.0, -1.0;
  b << -20.0, 0.0, 0.0, 2.0;
  const sqvar::BcProblem p = make_quadratic_hadamard(SymMatrix(a), SymMatrix(b));
  const SymMatrix eye = SymMatrix::Identity(2);
  Claims cl;

  cl.add("identity_first_order", certify_bc_1c(p, eye, tols).pass(1));

  const CertReport at_eye = certify_bc_2nc(p, eye, tols);
  cl.add("identity_not_second_order",
         !at_eye.pass(2) && std::abs(at_eye.second_order.lambda_min - (-2.0)) <= 1e-8,
         Json{{"lambda_min", at_eye.second_order.lambda_min}});

  Eigen::MatrixXd swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  cl.add("swap_root_second_order", certify_dss_sym(p, SymMatrix(swap), tols).pass(2));

  // local sampling around the swap root in svec coordinates of the factor
  const auto factor_objective = [&p](const Eigen::VectorXd& v) {
    const Eigen::MatrixXd f = sqvar::smat(v).mat();
    return p.eval(SymMatrix(f * f));
  };
  const sqvar::LocalCheckResult scan =
      sqvar::sample_local_check(factor_objective, sqvar::svec(SymMatrix(swap)), 0.05, 10000, seed);
  cl.add("factor_sampling_local_min", scan.min_gap >= -1e-12, Json{{"min_gap", scan.min_gap}});

  Eigen::MatrixXd bump(2, 2);
  bump << 0.0, 0.0, 0.0, 0.01;
  const double gap = p.eval(SymMatrix(Eigen::MatrixXd::Identity(2, 2) + bump)) - p.eval(eye);
  cl.add("cone_descent_at_identity", gap < 0.0, Json{{"gap", gap}});

  return finish("exB.1", cl, out_path);
}

int run_nucnorm_demo(const std::string& problem_path, Eigen::Index d1, Eigen::Index d2,
                     Eigen::Index rank, Eigen::Index m, std::uint64_t seed, double lambda,
                     sqvar::SolveOptions opts, const Tolerances& tols, const std::string& out_path) {
  sqvar::SensingInstance inst;
  if (!problem_path.empty()) {
    const sqvar::LoadedProblem prob = sqvar::load_problem_file(problem_path);
    if (!prob.sensing) sqvar::fail(Errc::Parse, "nucnorm demo needs a sensing dataset");
    inst = *prob.sensing;
  } else {
    inst = sqvar::make_gaussian_sensing(d1, d2, rank, m, seed, lambda);
  }
  // certificate residuals scale like gradient / lambda, so the stop must too
  opts.grad_tol = std::min(1e-8, std::max(1e-13, 1e-8 * inst.problem.lambda));
  const sqvar::NnmSolve sol = solve_nnm_dss(inst.problem, opts.seed, opts, tols);
  const double denom = std::max(1.0, inst.x_planted.norm());
  emit(Json{{"objective", sol.objective},
            {"recovery_error", (sol.x - inst.x_planted).norm() / denom},
            {"certified_1p", sol.report.pass}},
       out_path);
  if (sol.report.pass) return 0;
  if (sol.trace.termination == sqvar::Termination::MaxIter ||
      sol.trace.termination == sqvar::Termination::Stalled)
    return 5;
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"squared-variable reformulation toolkit"};
  app.require_subcommand(1);

  // certify
  auto* certify = app.add_subcommand("certify", "check necessary conditions at a point");
  std::string c_formulation, c_problem, c_point, c_out;
  int c_order = 2;
  certify->add_option("--formulation", c_formulation, "bc|dss|dss_sym|nsdp|ssv|ssv_sym|nnm")
      ->required()
      ->check(CLI::IsMember({"bc", "dss", "dss_sym", "nsdp", "ssv", "ssv_sym", "nnm"}));
  certify->add_option("--problem", c_problem, "problem JSON file")->required();
  certify->add_option("--point", c_point, "point JSON file")->required();
  auto* order_opt = certify->add_option("--order", c_order, "1: first order only, 2: both (default)")
                        ->check(CLI::IsMember({1, 2}));
  certify->add_option("--out", c_out, "also write the report here");
  TolFlags c_tols;
  c_tols.attach(certify);

  // solve
  auto* solve = app.add_subcommand("solve", "run a solver and certify the result");
  std::string s_method, s_problem, s_init, s_out, s_point_out, s_trace;
  std::uint64_t s_seed = 0;
  Eigen::Index s_width = 0;
  int s_max_iter = 400;
  solve->add_option("--method", s_method, "dss|dss_sym|ssv_auglag|nnm_dss")
      ->required()
      ->check(CLI::IsMember({"dss", "dss_sym", "ssv_auglag", "nnm_dss"}));
  solve->add_option("--problem", s_problem, "problem JSON file")->required();
  solve->add_option("--init", s_init, "start point JSON file (role-named keys)");
  solve->add_option("--seed", s_seed, "seed for the random start and solver");
  solve->add_option("--width", s_width, "factor width for dss starts (default: full)");
  solve->add_option("--max-iter", s_max_iter, "iteration budget");
  solve->add_option("--out", s_out, "also write the report here");
  solve->add_option("--point-out", s_point_out, "write the certifiable solution point here");
  solve->add_option("--trace", s_trace, "write per-iteration JSON lines here");
  TolFlags s_tols;
  s_tols.attach(solve);

  // lift
  auto* lift = app.add_subcommand("lift", "move points between formulations");
  std::string l_mode, l_problem, l_point, l_out;
  Eigen::Index l_width = 0, l_d1 = 0, l_d2 = 0;
  lift->add_option("--mode", l_mode, "factor|nnm_1p|project")
      ->required()
      ->check(CLI::IsMember({"factor", "nnm_1p", "project"}));
  lift->add_option("--point", l_point, "point JSON file")->required();
  lift->add_option("--problem", l_problem, "problem JSON file (nnm_1p)");
  lift->add_option("--width", l_width, "factor width (factor mode, default: matrix order)");
  lift->add_option("--d1", l_d1, "top block size (project mode)");
  lift->add_option("--d2", l_d2, "bottom block size (project mode)");
  lift->add_option("--out", l_out, "also write the result here");
  TolFlags l_tols;
  l_tols.attach(lift);

  // reproduce
  auto* reproduce = app.add_subcommand("reproduce", "re-run a worked example end to end");
  std::string r_name, r_out;
  Eigen::Index r_d = 6, r_k = 3;
  std::uint64_t r_seed = 0;
  reproduce->add_option("name", r_name, "ex2.1|ex2.2|ex3.1|exB.1")
      ->required()
      ->check(CLI::IsMember({"ex2.1", "ex2.2", "ex3.1", "exB.1"}));
  reproduce->add_option("--d", r_d, "matrix order (ex2.1)");
  reproduce->add_option("--k", r_k, "factor width (ex2.1)");
  reproduce->add_option("--seed", r_seed, "seed for sampling and solver starts");
  reproduce->add_option("--out", r_out, "also write the report here");
  TolFlags r_tols;
  r_tols.attach(reproduce);

  // nucnorm demo
  auto* nucnorm = app.add_subcommand("nucnorm", "nuclear-norm application");
  nucnorm->require_subcommand(1);
  auto* demo = nucnorm->add_subcommand("demo", "solve a sensing instance and certify it");
  std::string n_problem, n_out;
  Eigen::Index n_d1 = 8, n_d2 = 6, n_rank = 2, n_m = 120;
  std::uint64_t n_seed = 0;
  double n_lambda = 3e-5;
  int n_max_iter = 2000;
  demo->add_option("--problem", n_problem, "sensing dataset JSON {d1,d2,rank,m,seed,lambda}");
  demo->add_option("--d1", n_d1, "rows of the planted matrix");
  demo->add_option("--d2", n_d2, "columns of the planted matrix");
  demo->add_option("--rank", n_rank, "planted rank");
  demo->add_option("--m", n_m, "measurement count");
  demo->add_option("--seed", n_seed, "dataset and solver seed");
  demo->add_option("--lambda", n_lambda, "regularization weight");
  demo->add_option("--max-iter", n_max_iter, "iteration budget");
  demo->add_option("--out", n_out, "also write the result here");
  TolFlags n_tols;
  n_tols.attach(demo);

  try {
    app.parse(argc, argv);

    if (*certify)
      return run_certify(c_problem, c_point, c_formulation, c_order, order_opt->count() > 0,
                         c_tols.resolve(), c_out);
    if (*solve) {
      sqvar::SolveOptions opts;
      opts.seed = s_seed;
      opts.max_iter = s_max_iter;
      return run_solve(s_method, s_problem, s_init, opts, s_width, s_tols.resolve(), s_out,
                       s_point_out, s_trace);
    }
    if (*lift)
      return run_lift(l_mode, l_problem, l_point, l_width, l_d1, l_d2, l_tols.resolve(), l_out);
    if (*reproduce) {
      const Tolerances tols = r_tols.resolve();
      if (r_name == "ex2.1") return reproduce_ex21(r_d, r_k, r_seed, tols, r_out);
      if (r_name == "ex2.2") return reproduce_ex22(tols, r_out);
      if (r_name == "ex3.1") return reproduce_ex31(tols, r_out);
      return reproduce_exb1(r_seed, tols, r_out);
    }
    // nucnorm demo
    sqvar::SolveOptions opts;
    opts.seed = n_seed;
    opts.max_iter = n_max_iter;
    return run_nucnorm_demo(n_problem, n_d1, n_d2, n_rank, n_m, n_seed, n_lambda, opts,
                            n_tols.resolve(), n_out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const sqvar::Error& e) {
    std::cerr << e.what() << "\n";
    switch (e.code()) {
      case Errc::Parse:
      case Errc::DimensionMismatch:
      case Errc::NotSymmetric:
      case Errc::BadWidth:
      case Errc::BadDimension:
        return 2;
      default:
        return 4;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
