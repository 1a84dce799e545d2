#include "dqm/oracle.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "dqm/errors.hpp"
#include "dqm/expr.hpp"

namespace dqm {

namespace {

namespace ode = boost::numeric::odeint;
using State = std::vector<double>;

// y' = (y1, .., y_{m-1}, y_m) with y_m the root of residual(x, y0..ym) = 0.
class HighestDerivativeSystem {
 public:
  explicit HighestDerivativeSystem(const NonlinearProblem& p)
      : residual_(p.residual),
        partial_(differentiate(p.residual, derivative_symbol(p.order))),
        order_(p.order) {
    ctx_.eps = p.epsilon;
  }

  void operator()(const State& s, State& ds, double x) {
    ctx_.x = x;
    for (int k = 0; k < order_; ++k) ctx_.y[static_cast<std::size_t>(k)] = s[static_cast<std::size_t>(k)];
    double ym = last_;
    for (int it = 0; it < 30; ++it) {
      ctx_.y[static_cast<std::size_t>(order_)] = ym;
      const double g = evaluate(residual_, ctx_);
      const double dg = evaluate(partial_, ctx_);
      if (dg == 0.0) throw ConvergenceError("ivp: residual does not depend on the highest derivative");
      const double delta = g / dg;
      ym -= delta;
      if (std::abs(delta) <= 1e-15 * (1.0 + std::abs(ym))) break;
    }
    last_ = ym;
    for (int k = 0; k + 1 < order_; ++k) ds[static_cast<std::size_t>(k)] = s[static_cast<std::size_t>(k) + 1];
    ds[static_cast<std::size_t>(order_) - 1] = ym;
  }

 private:
  Expr residual_;
  Expr partial_;
  int order_;
  EvalContext<double> ctx_;
  double last_ = 0.0;
};

// Full states (y, .., y^(m-1)) at each time; times[0] must be a.
std::vector<State> integrate_states(const NonlinearProblem& p, const State& initial,
                                    const std::vector<double>& times, const IvpOptions& opt) {
  if (initial.size() != static_cast<std::size_t>(p.order)) {
    throw ValidationError("ivp: initial state must have one entry per derivative below the order");
  }
  std::vector<State> out;
  out.reserve(times.size());
  HighestDerivativeSystem sys(p);
  State s = initial;
  auto stepper = ode::make_controlled(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<State>());
  const double dt = 1e-4 * (p.b - p.a) * std::min(1.0, p.epsilon);
  ode::integrate_times(
      stepper, std::ref(sys), s, times.begin(), times.end(), dt,
      [&out](const State& st, double) {
        for (double v : st) {
          if (!std::isfinite(v)) throw ConvergenceError("ivp: solution blew up");
        }
        out.push_back(st);
      },
      ode::max_step_checker(1000000));
  return out;
}

std::vector<double> with_start(const NonlinearProblem& p, const std::vector<double>& abscissae) {
  std::vector<double> times;
  times.reserve(abscissae.size() + 2);
  times.push_back(p.a);
  for (double x : abscissae) {
    if (x < p.a || x > p.b) throw ValidationError("ivp: abscissa outside the problem domain");
    if (x > times.back()) {
      times.push_back(x);
    } else if (x < times.back()) {
      throw ValidationError("ivp: abscissae must be ascending");
    }
  }
  return times;
}

std::vector<double> values_at(const std::vector<State>& states, const std::vector<double>& times,
                              const std::vector<double>& abscissae) {
  std::vector<double> out;
  out.reserve(abscissae.size());
  std::size_t t = 0;
  for (double x : abscissae) {
    while (times[t] < x) ++t;
    out.push_back(states[t][0]);
  }
  return out;
}

}  // namespace

std::vector<double> integrate_ivp(const NonlinearProblem& p, const std::vector<double>& initial_state,
                                  const std::vector<double>& abscissae, const IvpOptions& opt) {
  const auto times = with_start(p, abscissae);
  return values_at(integrate_states(p, initial_state, times, opt), times, abscissae);
}

ShootingResult shoot(const NonlinearProblem& p, const std::vector<double>& abscissae,
                     const IvpOptions& opt) {
  validate(p);
  const auto m = static_cast<std::size_t>(p.order);
  State base(m, 0.0);
  std::vector<bool> fixed(m, false);
  std::vector<BoundaryCondition> far;
  std::optional<double> yb;
  for (const auto& c : p.conditions) {
    if (c.side == Side::A) {
      base[static_cast<std::size_t>(c.derivative_order)] = c.value;
      fixed[static_cast<std::size_t>(c.derivative_order)] = true;
    } else {
      far.push_back(c);
      if (c.derivative_order == 0) yb = c.value;
    }
  }
  std::vector<std::size_t> unknown;
  for (std::size_t k = 0; k < m; ++k) {
    if (!fixed[k]) unknown.push_back(k);
  }
  // Straight-line start for the unknown value and slope.
  if (!fixed[0] && yb) base[0] = *yb;
  if (m > 1 && !fixed[1] && fixed[0] && yb) base[1] = (*yb - base[0]) / (p.b - p.a);

  const std::vector<double> end_time{p.a, p.b};
  auto mismatch = [&](const State& init) {
    const auto st = integrate_states(p, init, end_time, opt).back();
    Eigen::VectorXd f(static_cast<Eigen::Index>(far.size()));
    for (std::size_t i = 0; i < far.size(); ++i) {
      f[static_cast<Eigen::Index>(i)] = st[static_cast<std::size_t>(far[i].derivative_order)] - far[i].value;
    }
    return f;
  };

  ShootingResult result;
  State init = base;
  if (!unknown.empty()) {
    double scale = 1.0;
    for (const auto& c : far) scale = std::max(scale, std::abs(c.value));
    Eigen::VectorXd f = mismatch(init);
    const auto q = static_cast<Eigen::Index>(unknown.size());
    bool done = false;
    for (int it = 0; it < 60 && !done; ++it) {
      if (f.cwiseAbs().maxCoeff() <= 1e-12 * scale) break;
      Eigen::MatrixXd jac(q, q);
      for (Eigen::Index j = 0; j < q; ++j) {
        const std::size_t k = unknown[static_cast<std::size_t>(j)];
        const double h = 1e-6 * (1.0 + std::abs(init[k]));
        State plus = init, minus = init;
        plus[k] += h;
        minus[k] -= h;
        jac.col(j) = (mismatch(plus) - mismatch(minus)) / (2.0 * h);
      }
      const Eigen::VectorXd step = jac.fullPivLu().solve(-f);
      bool accepted = false;
      for (double lambda = 1.0; lambda > 1e-4; lambda /= 2.0) {
        State trial = init;
        for (Eigen::Index j = 0; j < q; ++j) trial[unknown[static_cast<std::size_t>(j)]] += lambda * step[j];
        try {
          Eigen::VectorXd ft = mismatch(trial);
          if (ft.cwiseAbs().maxCoeff() < f.cwiseAbs().maxCoeff()) {
            init = trial;
            f = ft;
            accepted = true;
            break;
          }
        } catch (const Error&) {
          // overflow or domain failure along this trial: shorten the step
        }
      }
      ++result.iterations;
      if (!accepted) done = true;
    }
    result.mismatch = f.cwiseAbs().maxCoeff();
    if (result.mismatch > 1e-9 * scale) {
      throw ConvergenceError("shooting: boundary mismatch " + std::to_string(result.mismatch) +
                             " after " + std::to_string(result.iterations) + " iterations");
    }
  }
  result.initial_state = init;
  result.values = integrate_ivp(p, init, abscissae, opt);
  return result;
}

}  // namespace dqm
