// dqm: solve, tabulate and inspect Chebyshev differential quadrature problems.
//
// Exit codes: 0 ok, 2 invalid input, 3 solver failure, 4 I/O failure. Every
// failure prints one JSON line {"error": kind, "message": text} on stderr.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dqm/bench.hpp"
#include "dqm/diffmat.hpp"
#include "dqm/errors.hpp"
#include "dqm/io.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 2, kSolver = 3, kIo = 4 };

int fail(int code, const std::string& message) {
  static const char* kinds[] = {"", "", "validation", "solver", "io"};
  std::cerr << nlohmann::json{{"error", kinds[code]}, {"message", message}}.dump() << '\n';
  return code;
}

// Sends output to --out when given, stdout otherwise.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw dqm::IoError("write to stdout failed");
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw dqm::IoError("cannot open '" + out_path + "' for writing");
  f << text;
  f.close();
  if (!f) throw dqm::IoError("write to '" + out_path + "' failed");
}

struct SolveArgs {
  std::string builtin, file, out, format = "csv";
  std::size_t n = 0;
  std::optional<double> eps;
  double x_max = 1.0;
};

int cmd_solve(const SolveArgs& a) {
  dqm::AnyProblem problem;
  dqm::NewtonConfig cfg;
  std::string name;
  if (!a.builtin.empty()) {
    if (!a.eps) return fail(kValidation, "solve: --eps is required with --builtin");
    problem = dqm::builtin(a.builtin, a.x_max).make(*a.eps);
    name = a.builtin;
  } else {
    auto pf = dqm::load_problem(a.file);
    problem = std::move(pf.problem);
    cfg = pf.newton;
    if (a.eps) dqm::set_epsilon(problem, *a.eps);
    name = a.file;
  }
  const double eps = std::visit([](const auto& q) { return q.epsilon; }, problem);
  std::visit([](const auto& q) { dqm::validate(q); }, problem);
  const auto outcome = dqm::solve_any(problem, a.n, cfg);
  std::ostringstream os;
  if (a.format == "json") {
    dqm::write_solution_json(os, outcome, name, eps);
  } else {
    dqm::write_solution_csv(os, outcome, eps);
  }
  emit(a.out, os.str());
  return kOk;
}

struct TableArgs {
  std::string builtin, out, format = "csv";
  std::vector<std::size_t> n{10, 20, 50};
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  double x_max = 1.0;
};

int cmd_table(const TableArgs& a) {
  for (double e : a.eps) {
    if (!(e > 0)) return fail(kValidation, "table: epsilon values must be positive");
  }
  for (auto n : a.n) {
    if (n < 2) return fail(kValidation, "table: N values must be at least 2");
  }
  const auto t = dqm::run_table(dqm::builtin(a.builtin, a.x_max), a.n, a.eps);
  std::ostringstream os;
  if (a.format == "json") {
    dqm::write_table_json(os, t);
  } else {
    dqm::write_table_csv(os, t);
  }
  emit(a.out, os.str());
  for (const auto& c : t.cells) {
    if (c.report) return kOk;
  }
  return fail(kSolver, "table: every cell failed; first error: " + t.cells.front().error);
}

struct DiffmatArgs {
  std::size_t n = 0;
  int order = 1;
  std::vector<double> domain{-1.0, 1.0};
  std::string out;
};

int cmd_diffmat(const DiffmatArgs& a) {
  if (a.order < 1 || a.order > 4) return fail(kValidation, "diffmat: --order must be 1..4");
  if (a.domain.size() != 2) return fail(kValidation, "diffmat: --domain takes a,b");
  const auto g = dqm::make_grid<double>(a.n, a.domain[0], a.domain[1]);
  const auto w = dqm::derivative_matrices(g, a.order);
  std::ostringstream os;
  dqm::write_csv(os, w[static_cast<std::size_t>(a.order)]);
  emit(a.out, os.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chebyshev differential quadrature solver"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve one problem and print nodal values");
  auto* src = solve->add_option_group("source");
  src->add_option("--builtin", sa.builtin, "Built-in problem P1..P5");
  src->add_option("--file", sa.file, "JSON problem file");
  src->require_option(1);
  solve->add_option("--n", sa.n, "Number of grid points")->required();
  solve->add_option("--eps", sa.eps, "Perturbation parameter (overrides the file)");
  solve->add_option("--x-max", sa.x_max, "Truncation point for P5")->capture_default_str();
  solve->add_option("--out", sa.out, "Output path (default stdout)");
  solve->add_option("--format", sa.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  TableArgs ta;
  auto* table = app.add_subcommand("table", "Error-norm table over N and epsilon");
  table->add_option("--builtin", ta.builtin, "Built-in problem P1..P5")->required();
  table->add_option("--n", ta.n, "Grid sizes")->delimiter(',')->capture_default_str();
  table->add_option("--eps", ta.eps, "Epsilon values")->delimiter(',')->capture_default_str();
  table->add_option("--x-max", ta.x_max, "Truncation point for P5")->capture_default_str();
  table->add_option("--out", ta.out, "Output path (default stdout)");
  table->add_option("--format", ta.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  DiffmatArgs da;
  auto* diffmat = app.add_subcommand("diffmat", "Dump a differentiation matrix as CSV");
  diffmat->add_option("--n", da.n, "Number of grid points")->required();
  diffmat->add_option("--order", da.order, "Derivative order 1..4")->required();
  diffmat->add_option("--domain", da.domain, "Interval a,b")->delimiter(',')->expected(2);
  diffmat->add_option("--out", da.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kValidation, e.what());
  }

  try {
    if (*solve) return cmd_solve(sa);
    if (*table) return cmd_table(ta);
    return cmd_diffmat(da);
  } catch (const dqm::IoError& e) {
    return fail(kIo, e.what());
  } catch (const dqm::ValidationError& e) {
    return fail(kValidation, e.what());
  } catch (const dqm::ParseError& e) {
    return fail(kValidation, e.what());
  } catch (const dqm::EvalError& e) {
    return fail(e.kind() == dqm::EvalError::Kind::UnboundSymbol ? kValidation : kSolver, e.what());
  } catch (const dqm::Error& e) {
    return fail(kSolver, e.what());
  } catch (const std::exception& e) {
    return fail(kSolver, e.what());
  }
}
