#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dqm/chebgrid.hpp"
#include "dqm/diffmat.hpp"
#include "dqm/errors.hpp"
#include "dqm/expr.hpp"
#include "dqm/problem.hpp"

namespace dqm {

template <typename Scalar>
struct LinearSystem {
  Matrix<Scalar> matrix;
  Vector<Scalar> rhs;
};

namespace detail {

template <typename Scalar>
Scalar eval_at_node(const Expr& e, EvalContext<Scalar> ctx, std::size_t node) {
  try {
    return evaluate(e, ctx);
  } catch (const EvalError& err) {
    throw EvalError(err.kind(), err.position(),
                    "node " + std::to_string(node) + ": " + std::string(err.what()));
  }
}

template <typename Scalar>
void check_grid(const Grid<Scalar>& g, double a, double b) {
  if (g.a != static_cast<Scalar>(a) || g.b != static_cast<Scalar>(b)) {
    throw ValidationError("grid domain does not match problem domain");
  }
}

}  // namespace detail

/// Collocated system before boundary conditions:
/// A = sum_k c_k(x_i) W^(k), rhs_i = f(x_i). `w` holds W^(0..order).
template <typename Scalar>
LinearSystem<Scalar> assemble(const LinearProblem& p, const Grid<Scalar>& g,
                              const std::vector<Matrix<Scalar>>& w) {
  detail::check_grid(g, p.a, p.b);
  validate_grid_size(p.order, g.n_points);
  const auto n = static_cast<Eigen::Index>(g.n_points);
  LinearSystem<Scalar> sys{Matrix<Scalar>::Zero(n, n), Vector<Scalar>::Zero(n)};
  EvalContext<Scalar> ctx;
  ctx.eps = static_cast<Scalar>(p.epsilon);
  for (Eigen::Index i = 0; i < n; ++i) {
    ctx.x = g.nodes[i];
    const auto node = static_cast<std::size_t>(i);
    for (const auto& [k, coeff] : p.coefficients) {
      const Scalar c = detail::eval_at_node(coeff, ctx, node);
      if (c != Scalar(0)) sys.matrix.row(i) += c * w[static_cast<std::size_t>(k)].row(i);
    }
    sys.rhs[i] = detail::eval_at_node(p.rhs, ctx, node);
  }
  return sys;
}

template <typename Scalar>
LinearSystem<Scalar> assemble(const LinearProblem& p, const Grid<Scalar>& g) {
  return assemble(p, g, derivative_matrices(g, p.order));
}

/// Replaces one row per boundary condition (see condition_rows).
template <typename Scalar>
LinearSystem<Scalar> apply_conditions(LinearSystem<Scalar> sys,
                                      const std::vector<BoundaryCondition>& conditions,
                                      const std::vector<Matrix<Scalar>>& w) {
  const auto n = static_cast<std::size_t>(sys.matrix.rows());
  for (const auto& r : condition_rows(conditions, n)) {
    const auto row = static_cast<Eigen::Index>(r.row);
    sys.matrix.row(row) =
        w[static_cast<std::size_t>(r.derivative_order)].row(static_cast<Eigen::Index>(r.node));
    sys.rhs[row] = static_cast<Scalar>(r.value);
  }
  return sys;
}

template <typename Scalar>
LinearSystem<Scalar> apply_conditions(LinearSystem<Scalar> sys, const LinearProblem& p,
                                      const Grid<Scalar>& g) {
  return apply_conditions(std::move(sys), p.conditions, derivative_matrices(g, p.order));
}

/// Full pipeline: grid, weighting matrices, assembly, conditions, LU. The
/// work is done in long double and the values rounded to double.
Solution solve_linear(const LinearProblem& p, std::size_t n_points);

}  // namespace dqm
