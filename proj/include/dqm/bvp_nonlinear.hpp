#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dqm/chebgrid.hpp"
#include "dqm/diffmat.hpp"
#include "dqm/problem.hpp"

namespace dqm {

struct NewtonConfig {
  double tolerance = 1e-12;
  int max_iterations = 50;
  int max_halvings = 10;
  // Replaces the straight-line starting guess when set.
  std::optional<Vector<double>> initial_guess;
};

struct NewtonReport {
  int iterations = 0;
  double final_residual = 0.0;
  // Residual infinity-norm of the starting guess, then after each step.
  std::vector<double> history;
  bool converged = false;
};

struct NonlinearResult {
  Solution solution;
  NewtonReport report;
  // The iterate in the extended working precision of the iteration.
  Vector<long double> extended_values;
};

/// Collocated residual and Jacobian of a nonlinear problem on a fixed grid.
///
/// Rows not taken by boundary conditions hold G(x_i, y_i, (W1 y)_i, ..);
/// condition rows hold (W^(k) y)_node - value. The Jacobian is
/// sum_k diag(dG/dy_k) W^(k) with the condition rows copied from W^(k).
template <typename Scalar>
class Discretization {
 public:
  Discretization(const NonlinearProblem& p, const Grid<Scalar>& g);

  const Grid<Scalar>& grid() const { return grid_; }
  const std::vector<Matrix<Scalar>>& weights() const { return w_; }

  Vector<Scalar> residual(const Vector<Scalar>& y) const;
  Matrix<Scalar> jacobian(const Vector<Scalar>& y) const;

 private:
  std::vector<Vector<Scalar>> derivatives(const Vector<Scalar>& y) const;

  NonlinearProblem problem_;
  Grid<Scalar> grid_;
  std::vector<Matrix<Scalar>> w_;
  std::vector<Expr> partials_;
  std::vector<ConditionRow> rows_;
  std::vector<bool> replaced_;
};

Vector<double> residual(const NonlinearProblem& p, const Grid<double>& g, const Vector<double>& y);
Matrix<double> jacobian(const NonlinearProblem& p, const Grid<double>& g, const Vector<double>& y);

/// Straight line through the value conditions, or value plus slope when only
/// one value is prescribed.
Vector<double> initial_guess(const NonlinearProblem& p, const Grid<double>& g);

/// Damped Newton iteration in long double. The step is halved up to
/// `max_halvings` times until either the residual infinity-norm decreases or
/// the simplified correction J^{-1} R(trial) shrinks by (1 - lambda/4) against
/// the full one; no acceptable step ends the iteration with converged = false.
/// The second test lets the raw residual rise transiently, which avoids
/// stalling on the stiff boundary-layer problems.
NonlinearResult newton_solve(const NonlinearProblem& p, std::size_t n_points,
                             const NewtonConfig& cfg = {});

}  // namespace dqm
