#pragma once

// JSON input/output for the CLI: problem and point files, certificate
// reports, solver traces. Output numbers are printed with 17 significant
// digits through a fixed recursive writer so identical runs produce
// byte-identical reports.

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "sqvar/lift.hpp"
#include "sqvar/nucnorm.hpp"

namespace sqvar {

using Json = nlohmann::json;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& what) { fail(Errc::Parse, what); }

inline void check_keys(const Json& j, std::initializer_list<const char*> keys, const char* what) {
  if (!j.is_object()) parse_fail(std::string(what) + ": expected a JSON object");
  std::set<std::string> want;
  for (const char* k : keys) want.insert(k);
  for (const auto& item : j.items()) {
    if (want.erase(item.key()) == 0)
      parse_fail(std::string(what) + ": unexpected key \"" + item.key() + "\"");
  }
  if (!want.empty()) parse_fail(std::string(what) + ": missing key \"" + *want.begin() + "\"");
}

inline double number_at(const Json& j, const char* what) {
  if (!j.is_number()) parse_fail(std::string(what) + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_fail(std::string(what) + ": non-finite number");
  return v;
}

inline Eigen::Index integer_at(const Json& j, const char* what) {
  if (!j.is_number_integer()) parse_fail(std::string(what) + ": expected an integer");
  return j.get<Eigen::Index>();
}

}  // namespace detail

inline Eigen::VectorXd vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) detail::parse_fail(std::string(what) + ": expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = detail::number_at(j[static_cast<std::size_t>(i)], what);
  return v;
}

inline Eigen::MatrixXd matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) detail::parse_fail(std::string(what) + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty())
    detail::parse_fail(std::string(what) + ": expected rows to be nonempty arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      detail::parse_fail(std::string(what) + ": ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = detail::number_at(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

inline Json vector_to_json(const Eigen::VectorXd& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

inline Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json j = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) detail::parse_fail("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    detail::parse_fail("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

struct LoadedProblem {
  std::string family;
  std::optional<BcProblem> bc;
  std::optional<NsdpProblem> nsdp;
  std::optional<NnmProblem> nnm;
  std::optional<Example21> ex21;
  std::optional<SensingInstance> sensing;
};

namespace detail {

// "inner" descriptor of an nnm_bc problem: the rectangular smooth part h.
inline void load_nnm_inner(const Json& j, double lambda, LoadedProblem& out);

}  // namespace detail

// Problem files are {"family": ..., ...family-specific fields...}; unknown or
// missing keys are parse errors, never guessed around. A bare sensing dataset
// {d1, d2, rank, m, seed, lambda} is also accepted (the nucnorm demo format).
inline LoadedProblem load_problem(const Json& j) {
  if (j.is_object() && !j.contains("family")) {
    detail::check_keys(j, {"d1", "d2", "rank", "m", "seed", "lambda"}, "sensing dataset");
    LoadedProblem out;
    out.family = "nnm_bc";
    out.sensing = make_gaussian_sensing(detail::integer_at(j["d1"], "dataset d1"),
                                        detail::integer_at(j["d2"], "dataset d2"),
                                        detail::integer_at(j["rank"], "dataset rank"),
                                        detail::integer_at(j["m"], "dataset m"),
                                        static_cast<std::uint64_t>(detail::integer_at(j["seed"], "dataset seed")),
                                        detail::number_at(j["lambda"], "dataset lambda"));
    out.nnm = out.sensing->problem;
    out.bc = make_nnm_bc(*out.nnm);
    return out;
  }
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    detail::parse_fail("problem file: missing string key \"family\"");
  LoadedProblem out;
  out.family = j["family"].get<std::string>();
  if (out.family == "quadratic_square" || out.family == "quadratic_hadamard") {
    detail::check_keys(j, {"family", "A", "B"}, "problem file");
    const SymMatrix a(matrix_from_json(j["A"], "problem A"));
    const SymMatrix b(matrix_from_json(j["B"], "problem B"));
    out.bc = out.family == "quadratic_square" ? make_quadratic_square(a, b) : make_quadratic_hadamard(a, b);
  } else if (out.family == "least_squares") {
    detail::check_keys(j, {"family", "A_list", "b"}, "problem file");
    if (!j["A_list"].is_array() || j["A_list"].empty())
      detail::parse_fail("problem file: A_list must be a nonempty array of matrices");
    std::vector<SymMatrix> a_list;
    for (const Json& ja : j["A_list"]) a_list.emplace_back(matrix_from_json(ja, "problem A_list entry"));
    out.bc = make_least_squares(a_list, vector_from_json(j["b"], "problem b"));
  } else if (out.family == "example_2_1") {
    detail::check_keys(j, {"family", "d", "k"}, "problem file");
    out.ex21 = make_example_2_1(detail::integer_at(j["d"], "problem d"), detail::integer_at(j["k"], "problem k"));
    out.bc = out.ex21->problem;
  } else if (out.family == "example_3_1") {
    detail::check_keys(j, {"family"}, "problem file");
    out.nsdp = make_example_3_1();
  } else if (out.family == "nnm_bc") {
    detail::check_keys(j, {"family", "lambda", "inner"}, "problem file");
    detail::load_nnm_inner(j["inner"], detail::number_at(j["lambda"], "problem lambda"), out);
    out.bc = make_nnm_bc(*out.nnm);
  } else {
    detail::parse_fail("problem file: unknown family \"" + out.family + "\"");
  }
  return out;
}

namespace detail {

inline void load_nnm_inner(const Json& j, double lambda, LoadedProblem& out) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    parse_fail("problem inner: missing string key \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "matrix_fit") {
    check_keys(j, {"kind", "M"}, "problem inner");
    out.nnm = make_matrix_fit(matrix_from_json(j["M"], "inner M"), lambda);
  } else if (kind == "gaussian_sensing") {
    check_keys(j, {"kind", "d1", "d2", "rank", "m", "seed"}, "problem inner");
    out.sensing = make_gaussian_sensing(integer_at(j["d1"], "inner d1"), integer_at(j["d2"], "inner d2"),
                                        integer_at(j["rank"], "inner rank"), integer_at(j["m"], "inner m"),
                                        static_cast<std::uint64_t>(integer_at(j["seed"], "inner seed")), lambda);
    out.nnm = out.sensing->problem;
  } else {
    parse_fail("problem inner: unknown kind \"" + kind + "\"");
  }
}

}  // namespace detail

inline LoadedProblem load_problem_file(const std::string& path) { return load_problem(read_json_file(path)); }

inline Json report_to_json(const CertReport& rep) {
  Json j;
  j["formulation"] = rep.formulation;
  j["first_order"] = Json{{"pass", rep.first_order.pass}, {"residuals", rep.first_order.residuals}};
  Json so;
  so["evaluated"] = rep.second_order.evaluated;
  if (rep.second_order.evaluated) {
    so["pass"] = rep.second_order.pass;
    so["lambda_min"] = rep.second_order.lambda_min;
    so["subspace_dim"] = rep.second_order.subspace_dim;
    if (rep.second_order.witness.has_value()) {
      Json w;
      if (rep.second_order.witness->z.size() > 0) w["z"] = vector_to_json(rep.second_order.witness->z);
      if (rep.second_order.witness->delta.size() > 0) w["delta"] = matrix_to_json(rep.second_order.witness->delta);
      so["witness"] = w;
    }
  }
  j["second_order"] = so;
  j["tolerances"] = Json{{"feasTol", rep.tolerances.feas},
                         {"psdTol", rep.tolerances.psd},
                         {"curvTol", rep.tolerances.curv},
                         {"rankTol", rep.tolerances.rank}};
  return j;
}

inline Json report_to_json(const NnmReport& rep) {
  return Json{{"formulation", "nnm"},
              {"first_order", Json{{"pass", rep.pass}, {"residuals", rep.residuals}}},
              {"rank", rep.rank}};
}

namespace detail {

inline void dump_rec(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& item : j.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(item.key()).dump();
        out += ':';
        dump_rec(item.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ',';
        dump_rec(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", j.get<double>());
      out += buf;
      break;
    }
    default:
      out += j.dump();
      break;
  }
}

}  // namespace detail

// Deterministic serialization: sorted object keys (nlohmann's default map)
// and floats at 17 significant digits.
inline std::string dump_deterministic(const Json& j) {
  std::string out;
  detail::dump_rec(j, out);
  out += '\n';
  return out;
}

inline std::string trace_to_json_lines(const SolveTrace& trace) {
  std::string out;
  for (const IterRecord& it : trace.iterates) {
    out += dump_deterministic(Json{{"objective", it.objective},
                                   {"gradNorm", it.grad_norm},
                                   {"minCurv", it.min_curv},
                                   {"radius", it.radius}});
  }
  out += dump_deterministic(Json{{"termination", termination_name(trace.termination)}});
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream outf(path, std::ios::binary);
  require(static_cast<bool>(outf), Errc::Parse, "cannot open output file: " + std::string(path));
  outf << text;
}

}  // namespace sqvar
