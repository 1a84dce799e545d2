#include "dqm/bvp_nonlinear.hpp"

#include <cmath>

#include "dqm/bvp_linear.hpp"
#include "dqm/errors.hpp"
#include "dqm/linsys.hpp"

namespace dqm {

template <typename Scalar>
Discretization<Scalar>::Discretization(const NonlinearProblem& p, const Grid<Scalar>& g)
    : problem_(p), grid_(g) {
  validate(p);
  validate_grid_size(p.order, g.n_points);
  detail::check_grid(g, p.a, p.b);
  w_ = derivative_matrices(grid_, p.order);
  for (int k = 0; k <= p.order; ++k) {
    partials_.push_back(differentiate(p.residual, derivative_symbol(k)));
  }
  rows_ = condition_rows(p.conditions, g.n_points);
  replaced_.assign(g.n_points, false);
  for (const auto& r : rows_) replaced_[r.row] = true;
}

template <typename Scalar>
std::vector<Vector<Scalar>> Discretization<Scalar>::derivatives(const Vector<Scalar>& y) const {
  if (static_cast<std::size_t>(y.size()) != grid_.n_points) {
    throw ValidationError("nodal vector has length " + std::to_string(y.size()) + ", expected " +
                          std::to_string(grid_.n_points));
  }
  std::vector<Vector<Scalar>> d;
  d.reserve(w_.size());
  d.push_back(y);
  for (std::size_t k = 1; k < w_.size(); ++k) d.push_back(w_[k] * y);
  return d;
}

template <typename Scalar>
Vector<Scalar> Discretization<Scalar>::residual(const Vector<Scalar>& y) const {
  const auto d = derivatives(y);
  const auto n = static_cast<Eigen::Index>(grid_.n_points);
  Vector<Scalar> r(n);
  EvalContext<Scalar> ctx;
  ctx.eps = static_cast<Scalar>(problem_.epsilon);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (replaced_[static_cast<std::size_t>(i)]) continue;
    ctx.x = grid_.nodes[i];
    for (std::size_t k = 0; k < d.size(); ++k) ctx.y[k] = d[k][i];
    r[i] = detail::eval_at_node(problem_.residual, ctx, static_cast<std::size_t>(i));
  }
  for (const auto& c : rows_) {
    const auto node = static_cast<Eigen::Index>(c.node);
    r[static_cast<Eigen::Index>(c.row)] =
        d[static_cast<std::size_t>(c.derivative_order)][node] - static_cast<Scalar>(c.value);
  }
  return r;
}

template <typename Scalar>
Matrix<Scalar> Discretization<Scalar>::jacobian(const Vector<Scalar>& y) const {
  const auto d = derivatives(y);
  const auto n = static_cast<Eigen::Index>(grid_.n_points);
  Matrix<Scalar> j = Matrix<Scalar>::Zero(n, n);
  EvalContext<Scalar> ctx;
  ctx.eps = static_cast<Scalar>(problem_.epsilon);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (replaced_[static_cast<std::size_t>(i)]) continue;
    ctx.x = grid_.nodes[i];
    for (std::size_t k = 0; k < d.size(); ++k) ctx.y[k] = d[k][i];
    for (std::size_t k = 0; k < partials_.size(); ++k) {
      const Scalar g = detail::eval_at_node(partials_[k], ctx, static_cast<std::size_t>(i));
      if (g != Scalar(0)) j.row(i) += g * w_[k].row(i);
    }
  }
  for (const auto& c : rows_) {
    j.row(static_cast<Eigen::Index>(c.row)) =
        w_[static_cast<std::size_t>(c.derivative_order)].row(static_cast<Eigen::Index>(c.node));
  }
  return j;
}

template class Discretization<double>;
template class Discretization<long double>;

Vector<double> residual(const NonlinearProblem& p, const Grid<double>& g, const Vector<double>& y) {
  return Discretization<double>(p, g).residual(y);
}

Matrix<double> jacobian(const NonlinearProblem& p, const Grid<double>& g, const Vector<double>& y) {
  return Discretization<double>(p, g).jacobian(y);
}

Vector<double> initial_guess(const NonlinearProblem& p, const Grid<double>& g) {
  std::optional<double> ya, yb, sa, sb;
  for (const auto& c : p.conditions) {
    auto& slot = c.derivative_order == 0 ? (c.side == Side::A ? ya : yb)
                                         : (c.side == Side::A ? sa : sb);
    if (c.derivative_order <= 1) slot = c.value;
  }
  double x0 = p.a, y0 = 0.0, slope = 0.0;
  if (ya && yb) {
    y0 = *ya;
    slope = (*yb - *ya) / (p.b - p.a);
  } else if (ya || yb) {
    x0 = ya ? p.a : p.b;
    y0 = ya ? *ya : *yb;
    if (sa) {
      slope = *sa;
    } else if (sb) {
      slope = *sb;
    }
  } else if (sa || sb) {
    slope = sa ? *sa : *sb;
  }
  Vector<double> y(g.n_points);
  for (std::size_t i = 0; i < g.n_points; ++i) {
    y[static_cast<Eigen::Index>(i)] = y0 + slope * (g.nodes[static_cast<Eigen::Index>(i)] - x0);
  }
  return y;
}

namespace {

template <typename Scalar>
NewtonReport newton_iterate(const Discretization<Scalar>& disc, Vector<Scalar>& y,
                            const NewtonConfig& cfg) {
  NewtonReport report;
  Vector<Scalar> r = disc.residual(y);
  Scalar rnorm = r.cwiseAbs().maxCoeff();
  report.history.push_back(static_cast<double>(rnorm));
  const auto tol = static_cast<Scalar>(cfg.tolerance);
  while (!(rnorm <= tol) && report.iterations < cfg.max_iterations) {
    const auto lu = lu_factor(disc.jacobian(y));
    const Vector<Scalar> step = lu_solve(lu, Vector<Scalar>(-r)).x;
    const Scalar step_norm = step.cwiseAbs().maxCoeff();
    Scalar lambda(1);
    bool accepted = false;
    for (int h = 0; h <= cfg.max_halvings; ++h, lambda /= Scalar(2)) {
      Vector<Scalar> trial = y + lambda * step;
      Vector<Scalar> rt = disc.residual(trial);
      const Scalar tnorm = rt.cwiseAbs().maxCoeff();
      // Natural monotonicity: the simplified correction J_k^{-1} R(trial)
      // must shrink relative to the full correction.
      const Scalar simplified = lu_solve(lu, Vector<Scalar>(-rt)).x.cwiseAbs().maxCoeff();
      if (tnorm < rnorm || simplified <= (Scalar(1) - lambda / Scalar(4)) * step_norm) {
        y = std::move(trial);
        r = std::move(rt);
        rnorm = tnorm;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    ++report.iterations;
    report.history.push_back(static_cast<double>(rnorm));
  }
  report.final_residual = static_cast<double>(rnorm);
  report.converged = rnorm <= tol;
  return report;
}

}  // namespace

NonlinearResult newton_solve(const NonlinearProblem& p, std::size_t n_points,
                             const NewtonConfig& cfg) {
  validate(p);
  validate_grid_size(p.order, n_points);
  if (!(cfg.tolerance > 0.0) || cfg.max_iterations < 1 || cfg.max_halvings < 0) {
    throw ValidationError("newton config requires tolerance > 0 and max_iterations >= 1");
  }
  using Work = long double;
  const auto grid = make_grid<double>(n_points, p.a, p.b);
  const Discretization<Work> disc(p, make_grid<Work>(n_points, p.a, p.b));

  Vector<double> guess = cfg.initial_guess ? *cfg.initial_guess : initial_guess(p, grid);
  if (static_cast<std::size_t>(guess.size()) != n_points) {
    throw ValidationError("initial guess has the wrong length");
  }
  Vector<Work> y = guess.cast<Work>();
  NonlinearResult out;
  out.report = newton_iterate(disc, y, cfg);

  out.solution.grid = grid;
  out.solution.values = y.cast<double>();
  out.extended_values = y;
  out.solution.diagnostics.residual_inf = out.report.final_residual;
  const auto lu = lu_factor(disc.jacobian(y));
  out.solution.diagnostics.condition_estimate = static_cast<double>(condition_estimate(lu));
  out.solution.diagnostics.growth = static_cast<double>(lu.growth);
  return out;
}

}  // namespace dqm
