#include <gtest/gtest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "dqm/errors.hpp"
#include "dqm/io.hpp"

using namespace dqm;

namespace {

const char* kLinear = R"js({
  "order": 3,
  "coefficients": {"3": "eps", "1": "4", "0": "-4"},
  "rhs": "x^2",
  "domain": [0, 1],
  "epsilon": 0.1,
  "conditions": [{"side": "a", "deriv": 0, "value": 0.5},
                 {"side": "a", "deriv": 1, "value": 0.5},
                 {"side": "b", "deriv": 0, "value": 1.47}]
})js";

const char* kNonlinear = R"js({
  "order": 3,
  "residual": "eps*y3 + y2 + eps*(y1^2 + y0) - eps*exp(-2*x)",
  "domain": [0, 100],
  "x_max": 1,
  "epsilon": 0.1,
  "conditions": [{"side": "a", "deriv": 0, "value": 2},
                 {"side": "a", "deriv": 1, "value": -1},
                 {"side": "a", "deriv": 2, "value": 1}],
  "newton": {"tol": 1e-11, "max_iter": 30}
})js";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  if (at != std::string::npos) s.replace(at, from.size(), to);
  return s;
}

}  // namespace

TEST(Io, ParsesLinear) {
  const auto pf = parse_problem(kLinear);
  const auto& p = std::get<LinearProblem>(pf.problem);
  EXPECT_EQ(p.order, 3);
  EXPECT_EQ(p.coefficients.size(), 3u);
  EXPECT_EQ(p.conditions[2].side, Side::B);
  EXPECT_EQ(p.conditions[2].value, 1.47);
  const auto s = solve_any(pf.problem, 20);
  const auto builtin_s = solve_any(builtin("P1").make(0.1), 20);
  EXPECT_EQ(s.solution.values, builtin_s.solution.values);
}

TEST(Io, ParsesNonlinear) {
  const auto pf = parse_problem(kNonlinear);
  const auto& p = std::get<NonlinearProblem>(pf.problem);
  EXPECT_EQ(p.b, 1.0);
  EXPECT_EQ(pf.newton.tolerance, 1e-11);
  EXPECT_EQ(pf.newton.max_iterations, 30);
}

TEST(Io, RejectsMalformed) {
  const std::string lin = kLinear;
  const char* bad[] = {"{", "[]", "{}"};
  for (const char* b : bad) EXPECT_THROW(parse_problem(b), ValidationError) << b;
  EXPECT_THROW(parse_problem(replace(lin, R"("order": 3,)", "")), ValidationError);
  EXPECT_THROW(parse_problem(replace(lin, R"("order": 3)", R"("order": 3.5)")), ValidationError);
  EXPECT_THROW(parse_problem(replace(lin, R"("side": "b")", R"("side": "c")")), ValidationError);
  EXPECT_THROW(parse_problem(replace(lin, R"("deriv": 1)", R"("deriv": 0)")), ValidationError);
  EXPECT_THROW(parse_problem(replace(lin, R"("domain": [0, 1])", R"("domain": [1, 0])")), ValidationError);
  EXPECT_THROW(parse_problem(replace(lin, R"("3": "eps")", R"("5": "eps")")), ValidationError);
  EXPECT_THROW(parse_problem(replace(lin, R"("rhs": "x^2",)", R"("rhs": "x^2", "residual": "y0",)")),
               ValidationError);
  EXPECT_THROW(parse_problem(replace(lin, R"("x^2")", R"("x^^2")")), ParseError);
  EXPECT_THROW(parse_problem(replace(kNonlinear, R"("tol": 1e-11)", R"("tol": -1)")), ValidationError);
}

TEST(Io, MissingFile) { EXPECT_THROW(load_problem("/nonexistent/problem.json"), IoError); }

TEST(Io, SetEpsilon) {
  auto p = builtin("P4").make(0.1);
  set_epsilon(p, 0.5);
  EXPECT_EQ(std::get<NonlinearProblem>(p).epsilon, 0.5);
}

TEST(Io, TableCsv) {
  Table t;
  t.problem = "P1";
  t.n_list = {10};
  t.eps_list = {0.1, 0.01};
  TableCell ok;
  ok.n_points = 10;
  ok.epsilon = 0.1;
  ok.report = ErrorReport{};
  ok.report->l2 = 3.39351e-4;
  ok.report->linf = 2.0251e-4;
  TableCell bad;
  bad.n_points = 10;
  bad.epsilon = 0.01;
  bad.error = "boom";
  t.cells = {ok, bad};
  std::ostringstream os;
  write_table_csv(os, t);
  EXPECT_EQ(os.str(),
            "problem,norm,N,epsilon,value\n"
            "P1,L2,10,0.1,3.394E-04\n"
            "P1,L2,10,0.01,failed\n"
            "P1,Linf,10,0.1,2.025E-04\n"
            "P1,Linf,10,0.01,failed\n");
  std::ostringstream js;
  write_table_json(js, t);
  const auto doc = nlohmann::json::parse(js.str());
  EXPECT_EQ(doc["cells"][0]["l2"].get<double>(), 3.39351e-4);
  EXPECT_EQ(doc["cells"][1]["error"], "boom");
}

TEST(Io, SolutionJson) {
  const auto s = solve_any(builtin("P4").make(0.1), 12);
  std::ostringstream os;
  write_solution_json(os, s, "P4", 0.1);
  const auto doc = nlohmann::json::parse(os.str());
  EXPECT_EQ(doc["x"].size(), 12u);
  EXPECT_EQ(doc["y"][11].get<double>(), s.solution.values[11]);
  EXPECT_TRUE(doc["newton"]["converged"].get<bool>());
}
