#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dqm/bvp_nonlinear.hpp"
#include "dqm/problem.hpp"

namespace dqm {

using AnyProblem = std::variant<LinearProblem, NonlinearProblem>;

enum class ReferenceKind { ClosedForm, Oracle };

/// A catalog entry: problem factory in epsilon plus its reference kind.
struct BenchProblem {
  std::string id;
  ReferenceKind reference_kind = ReferenceKind::ClosedForm;
  std::function<AnyProblem(double eps)> make;
};

/// P1..P5. `x_max` truncates the semi-infinite domain of P5.
BenchProblem builtin(std::string_view id, double x_max = 1.0);
std::vector<std::string> builtin_ids();

/// Error norms between nodal vectors. l2 is the plain root-sum-square over
/// nodes (no quadrature weights, no 1/N), so it grows with N for a fixed
/// pointwise error.
struct ErrorReport {
  double l2 = 0.0;
  double linf = 0.0;
  std::size_t n_points = 0;
  double epsilon = 0.0;
  Vector<double> exact;
  Vector<double> numerical;
};

ErrorReport error_norms(const Vector<double>& numerical, const Vector<double>& reference);

/// Closed form for P1 and P3. For P2, P4 and P5 a self-converged collocation
/// solution (interpolated) and a Runge-Kutta shooting solution must agree to
/// `kOracleAgreement`; the shooting values are returned. The collocation
/// route starts at 2N nodes, N the number of abscissae, and grows by half
/// until successive interpolants change by at most `kSelfConvergence`.
std::vector<double> reference(const BenchProblem& p, const std::vector<double>& at, double epsilon);

inline constexpr double kOracleAgreement = 1e-8;
inline constexpr double kSelfConvergence = 1e-8;
inline constexpr std::size_t kMaxOracleNodes = 160;
inline constexpr double kStalledResidual = 1e-6;

/// The two oracle routes for P2/P4/P5, kept separate for auditing.
struct OraclePair {
  std::vector<double> collocation;
  std::vector<double> shooting;
  double disagreement = 0.0;
  std::size_t collocation_nodes = 0;
};
OraclePair oracle_pair(const BenchProblem& p, const std::vector<double>& at, double epsilon);

struct SolveOutcome {
  Solution solution;
  std::optional<NewtonReport> newton;
};

/// Linear problems go to solve_linear, nonlinear ones to newton_solve.
/// Non-convergence raises ConvergenceError.
SolveOutcome solve_any(const AnyProblem& p, std::size_t n_points, const NewtonConfig& cfg = {});

struct TableCell {
  std::size_t n_points = 0;
  double epsilon = 0.0;
  std::optional<ErrorReport> report;
  std::string error;
};

/// cells[i * eps_list.size() + j] holds (n_list[i], eps_list[j]).
struct Table {
  std::string problem;
  std::vector<std::size_t> n_list;
  std::vector<double> eps_list;
  std::vector<TableCell> cells;

  const TableCell& cell(std::size_t i, std::size_t j) const { return cells[i * eps_list.size() + j]; }
};

/// One solve per (N, eps) cell, run concurrently; failures stay in-band.
Table run_table(const BenchProblem& p, const std::vector<std::size_t>& n_list,
                const std::vector<double>& eps_list);

}  // namespace dqm
