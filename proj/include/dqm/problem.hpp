#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "dqm/chebgrid.hpp"
#include "dqm/expr.hpp"

namespace dqm {

enum class Side { A, B };

struct BoundaryCondition {
  Side side = Side::A;
  int derivative_order = 0;
  double value = 0.0;
};

/// sum_k coefficients[k](x, eps) * y^(k) = rhs(x, eps) on [a, b].
struct LinearProblem {
  int order = 1;
  std::map<int, Expr> coefficients;
  Expr rhs;
  double a = 0.0;
  double b = 1.0;
  double epsilon = 0.1;
  std::vector<BoundaryCondition> conditions;
};

/// residual(x, eps, y0, .., y_order) = 0 on [a, b].
struct NonlinearProblem {
  int order = 1;
  Expr residual;
  double a = 0.0;
  double b = 1.0;
  double epsilon = 0.1;
  std::vector<BoundaryCondition> conditions;
};

/// Throws ValidationError when a problem is malformed.
void validate(const LinearProblem& p);
void validate(const NonlinearProblem& p);
void validate_grid_size(int order, std::size_t n_points);

/// One boundary condition placed on one row of the collocation system.
struct ConditionRow {
  std::size_t row = 0;
  std::size_t node = 0;
  int derivative_order = 0;
  double value = 0.0;
};

/// Rows replaced by boundary conditions. a-side conditions take rows 0, 1,
/// .. in ascending derivative order; b-side conditions take rows N-1, N-2, ..
/// in the same order.
std::vector<ConditionRow> condition_rows(const std::vector<BoundaryCondition>& conditions,
                                         std::size_t n_points);

/// Residual form of a linear problem: sum_k c_k y_k - rhs.
NonlinearProblem as_nonlinear(const LinearProblem& p);

struct SolveDiagnostics {
  double residual_inf = 0.0;
  double condition_estimate = 0.0;
  double growth = 1.0;
};

struct Solution {
  Grid<double> grid;
  Vector<double> values;
  SolveDiagnostics diagnostics;
};

}  // namespace dqm
