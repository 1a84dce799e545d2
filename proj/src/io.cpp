#include "dqm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dqm/errors.hpp"

namespace dqm {

namespace {

using nlohmann::json;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

const json& require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ValidationError(std::string("problem file: missing key '") + key + "'");
  return doc.at(key);
}

double number(const json& v, const char* what) {
  if (!v.is_number()) throw ValidationError(std::string("problem file: '") + what + "' must be a number");
  return v.get<double>();
}

Expr expression(const json& v, const char* what) {
  if (!v.is_string()) throw ValidationError(std::string("problem file: '") + what + "' must be a string");
  return parse(v.get<std::string>());
}

}  // namespace

ProblemFile parse_problem(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("problem file: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("problem file: top level must be an object");

  const bool linear = doc.contains("coefficients") || doc.contains("rhs");
  const bool nonlinear = doc.contains("residual");
  if (linear == nonlinear) {
    throw ValidationError("problem file: give either coefficients and rhs (linear) or residual (nonlinear)");
  }

  const json& order = require(doc, "order");
  if (!order.is_number_integer()) throw ValidationError("problem file: 'order' must be an integer");

  const json& domain = require(doc, "domain");
  if (!domain.is_array() || domain.size() != 2) throw ValidationError("problem file: 'domain' must be [a, b]");
  const double a = number(domain[0], "domain");
  double b = number(domain[1], "domain");
  if (doc.contains("x_max")) b = number(doc["x_max"], "x_max");

  std::vector<BoundaryCondition> conds;
  const json& cj = require(doc, "conditions");
  if (!cj.is_array()) throw ValidationError("problem file: 'conditions' must be an array");
  for (const auto& c : cj) {
    if (!c.is_object()) throw ValidationError("problem file: each condition must be an object");
    const json& side = require(c, "side");
    if (side != "a" && side != "b") throw ValidationError("problem file: condition side must be \"a\" or \"b\"");
    const json& deriv = require(c, "deriv");
    if (!deriv.is_number_integer()) throw ValidationError("problem file: condition 'deriv' must be an integer");
    conds.push_back({side == "a" ? Side::A : Side::B, deriv.get<int>(), number(require(c, "value"), "value")});
  }

  ProblemFile out;
  const double eps = number(require(doc, "epsilon"), "epsilon");
  if (linear) {
    LinearProblem p;
    p.order = order.get<int>();
    p.a = a;
    p.b = b;
    p.epsilon = eps;
    p.conditions = std::move(conds);
    const json& co = require(doc, "coefficients");
    if (!co.is_object()) throw ValidationError("problem file: 'coefficients' must map \"0\"..\"4\" to expressions");
    for (const auto& [key, val] : co.items()) {
      if (key.size() != 1 || key[0] < '0' || key[0] > '4') {
        throw ValidationError("problem file: coefficient key '" + key + "' must be \"0\"..\"4\"");
      }
      p.coefficients[key[0] - '0'] = expression(val, "coefficients");
    }
    p.rhs = expression(require(doc, "rhs"), "rhs");
    validate(p);
    out.problem = std::move(p);
  } else {
    NonlinearProblem p;
    p.order = order.get<int>();
    p.a = a;
    p.b = b;
    p.epsilon = eps;
    p.conditions = std::move(conds);
    p.residual = expression(doc["residual"], "residual");
    validate(p);
    out.problem = std::move(p);
  }
  if (doc.contains("newton")) {
    const json& nj = doc["newton"];
    if (!nj.is_object()) throw ValidationError("problem file: 'newton' must be an object");
    if (nj.contains("tol")) {
      out.newton.tolerance = number(nj["tol"], "newton.tol");
      if (!(out.newton.tolerance > 0)) throw ValidationError("problem file: newton.tol must be positive");
    }
    if (nj.contains("max_iter")) {
      if (!nj["max_iter"].is_number_integer() || nj["max_iter"].get<int>() < 1) {
        throw ValidationError("problem file: newton.max_iter must be a positive integer");
      }
      out.newton.max_iterations = nj["max_iter"].get<int>();
    }
  }
  return out;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return parse_problem(ss.str());
}

void set_epsilon(AnyProblem& p, double eps) {
  std::visit([eps](auto& q) { q.epsilon = eps; }, p);
}

void write_solution_csv(std::ostream& os, const SolveOutcome& s, double epsilon) {
  const auto& d = s.solution.diagnostics;
  os << "# n_points=" << s.solution.values.size() << " epsilon=" << fmt("%.17g", epsilon) << '\n';
  os << "# residual_inf=" << fmt("%.17g", d.residual_inf) << " condition_estimate=" << fmt("%.17g", d.condition_estimate)
     << " growth=" << fmt("%.17g", d.growth) << '\n';
  if (s.newton) {
    os << "# newton_iterations=" << s.newton->iterations << " newton_residual=" << fmt("%.17g", s.newton->final_residual)
       << '\n';
  }
  os << "x,y\n";
  for (Eigen::Index i = 0; i < s.solution.values.size(); ++i) {
    os << fmt("%.17g", s.solution.grid.nodes[i]) << ',' << fmt("%.17g", s.solution.values[i]) << '\n';
  }
}

void write_solution_json(std::ostream& os, const SolveOutcome& s, const std::string& problem, double epsilon) {
  json doc;
  doc["problem"] = problem;
  doc["epsilon"] = epsilon;
  doc["n_points"] = s.solution.values.size();
  doc["x"] = std::vector<double>(s.solution.grid.nodes.data(), s.solution.grid.nodes.data() + s.solution.grid.nodes.size());
  doc["y"] = std::vector<double>(s.solution.values.data(), s.solution.values.data() + s.solution.values.size());
  const auto& d = s.solution.diagnostics;
  doc["diagnostics"] = {{"residual_inf", d.residual_inf},
                        {"condition_estimate", d.condition_estimate},
                        {"growth", d.growth}};
  if (s.newton) {
    doc["newton"] = {{"iterations", s.newton->iterations},
                     {"final_residual", s.newton->final_residual},
                     {"history", s.newton->history},
                     {"converged", s.newton->converged}};
  }
  os << doc.dump(2) << '\n';
}

void write_table_csv(std::ostream& os, const Table& t) {
  os << "problem,norm,N,epsilon,value\n";
  for (std::size_t i = 0; i < t.n_list.size(); ++i) {
    for (const char* norm : {"L2", "Linf"}) {
      for (std::size_t j = 0; j < t.eps_list.size(); ++j) {
        const auto& c = t.cell(i, j);
        os << t.problem << ',' << norm << ',' << c.n_points << ',' << fmt("%g", c.epsilon) << ',';
        if (c.report) {
          os << fmt("%.3E", norm[1] == '2' ? c.report->l2 : c.report->linf);
        } else {
          os << "failed";
        }
        os << '\n';
      }
    }
  }
}

void write_table_json(std::ostream& os, const Table& t) {
  json cells = json::array();
  for (const auto& c : t.cells) {
    json cj{{"N", c.n_points}, {"epsilon", c.epsilon}};
    if (c.report) {
      cj["l2"] = c.report->l2;
      cj["linf"] = c.report->linf;
    } else {
      cj["error"] = c.error;
    }
    cells.push_back(std::move(cj));
  }
  json doc{{"problem", t.problem}, {"N", t.n_list}, {"epsilon", t.eps_list}, {"cells", std::move(cells)}};
  os << doc.dump(2) << '\n';
}

}  // namespace dqm
