#include "dqm/bench.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "dqm/bvp_linear.hpp"
#include "dqm/diffmat.hpp"
#include "dqm/errors.hpp"
#include "dqm/linsys.hpp"
#include "dqm/oracle.hpp"

namespace dqm {

namespace {

using Real = long double;

LinearProblem linear(int order, std::map<int, Expr> coeffs, const char* rhs, double a, double b,
                     double eps, std::vector<BoundaryCondition> conds) {
  LinearProblem p;
  p.order = order;
  p.coefficients = std::move(coeffs);
  p.rhs = parse(rhs);
  p.a = a;
  p.b = b;
  p.epsilon = eps;
  p.conditions = std::move(conds);
  return p;
}

NonlinearProblem nonlinear(int order, const char* residual, double a, double b, double eps,
                           std::vector<BoundaryCondition> conds) {
  NonlinearProblem p;
  p.order = order;
  p.residual = parse(residual);
  p.a = a;
  p.b = b;
  p.epsilon = eps;
  p.conditions = std::move(conds);
  return p;
}

// eps y''' + 4y' - 4y = x^2, y(0) = 0.5, y'(0) = 0.5, y(1) = 1.47.
// y = -x^2/4 - x/2 - 1/2 + c1 e^{rx} + e^{sx}(c2 cos wx + c3 sin wx), with
// r the real root of eps m^3 + 4m - 4 and s +- iw the complex pair.
std::vector<double> p1_exact(const std::vector<double>& at, double epsilon) {
  const Real eps = epsilon;
  Real r = 1;
  for (int it = 0; it < 100; ++it) {
    const Real f = eps * r * r * r + 4 * r - 4;
    const Real df = 3 * eps * r * r + 4;
    const Real dr = f / df;
    r -= dr;
    if (std::abs(dr) <= 1e-19L * (1 + std::abs(r))) break;
  }
  // eps m^2 + eps r m + (eps r^2 + 4) = 0
  const Real s = -r / 2;
  const Real w = std::sqrt(4 * eps * (eps * r * r + 4) - eps * eps * r * r) / (2 * eps);

  struct Basis {
    Real v[3];
    Real d[3];
  };
  auto basis = [&](Real x) {
    const Real er = std::exp(r * x), es = std::exp(s * x);
    const Real c = std::cos(w * x), sn = std::sin(w * x);
    return Basis{{er, es * c, es * sn}, {r * er, es * (s * c - w * sn), es * (s * sn + w * c)}};
  };
  auto particular = [](Real x) { return -x * x / 4 - x / 2 - Real(0.5); };
  auto particular_d = [](Real x) { return -x / 2 - Real(0.5); };

  Matrix<Real> m(3, 3);
  Vector<Real> rhs(3);
  const Basis b0 = basis(0), b1 = basis(1);
  for (int j = 0; j < 3; ++j) {
    m(0, j) = b0.v[j];
    m(1, j) = b0.d[j];
    m(2, j) = b1.v[j];
  }
  rhs << Real(0.5) - particular(0), Real(0.5) - particular_d(0), Real(1.47) - particular(1);
  const Vector<Real> c = lu_solve(lu_factor(m), rhs).x;

  std::vector<double> out;
  out.reserve(at.size());
  for (double xd : at) {
    const Real x = xd;
    const Basis bx = basis(x);
    out.push_back(static_cast<double>(particular(x) + c[0] * bx.v[0] + c[1] * bx.v[1] + c[2] * bx.v[2]));
  }
  return out;
}

// -eps y'''' - 4y''' = 1, y(0) = y(1) = 1, y''(0) = y''(1) = -1.
// y''' = C e^{-kx} - 1/4 with k = 4/eps. Writing the exponential part as
// C g(x) with g''' = e^{-kx} and g(0) = g'(0) = g''(0) = 0 keeps the
// eps -> infinity limit finite.
std::vector<double> p3_exact(const std::vector<double>& at, double epsilon) {
  const Real k = Real(4) / Real(epsilon);
  auto g = [k](Real x) {
    const Real u = k * x;
    if (u < Real(0.1)) {
      return x * x * x * (Real(1) / 6 - u / 24 + u * u / 120 - u * u * u / 720 + u * u * u * u / 5040);
    }
    return -(std::expm1(-u) + u - u * u / 2) / (k * k * k);
  };
  auto g2 = [k](Real x) { return -std::expm1(-k * x) / k; };
  const Real f = 1;     // y(0)
  const Real d = -1;    // y''(0)
  const Real c = (Real(-1) + Real(0.25) - d) / g2(1);
  const Real e = Real(1) - c * g(1) + Real(1) / 24 - d / 2 - f;
  std::vector<double> out;
  out.reserve(at.size());
  for (double xd : at) {
    const Real x = xd;
    out.push_back(static_cast<double>(c * g(x) - x * x * x / 24 + d * x * x / 2 + e * x + f));
  }
  return out;
}

NonlinearProblem residual_form(const AnyProblem& p) {
  if (const auto* lp = std::get_if<LinearProblem>(&p)) return as_nonlinear(*lp);
  return std::get<NonlinearProblem>(p);
}

std::vector<double> interpolate(const Solution& s, const std::vector<double>& at) {
  const auto fit = chebyshev_fit(s.values, s.grid);
  std::vector<double> out;
  out.reserve(at.size());
  for (double x : at) out.push_back(evaluate(fit, x));
  return out;
}

}  // namespace

BenchProblem builtin(std::string_view id, double x_max) {
  using BC = BoundaryCondition;
  if (id == "P1") {
    return {"P1", ReferenceKind::ClosedForm, [](double eps) -> AnyProblem {
              return linear(3, {{3, parse("eps")}, {1, parse("4")}, {0, parse("-4")}}, "x^2", 0, 1, eps,
                            {BC{Side::A, 0, 0.5}, BC{Side::A, 1, 0.5}, BC{Side::B, 0, 1.47}});
            }};
  }
  if (id == "P2") {
    return {"P2", ReferenceKind::Oracle, [](double eps) -> AnyProblem {
              return linear(3, {{3, parse("eps")}, {1, parse("(1+x/2)")}, {0, parse("-1/2")}}, "0", 0, 1,
                            eps, {BC{Side::A, 0, 0.6}, BC{Side::A, 1, 0.23}, BC{Side::B, 0, 0.9}});
            }};
  }
  if (id == "P3") {
    return {"P3", ReferenceKind::ClosedForm, [](double eps) -> AnyProblem {
              return linear(4, {{4, parse("-eps")}, {3, parse("-4")}}, "1", 0, 1, eps,
                            {BC{Side::A, 0, 1.0}, BC{Side::A, 2, -1.0}, BC{Side::B, 0, 1.0},
                             BC{Side::B, 2, -1.0}});
            }};
  }
  if (id == "P4") {
    return {"P4", ReferenceKind::Oracle, [](double eps) -> AnyProblem {
              return nonlinear(3, "eps*y3 + y2 + eps*y1*(y1+2) - 1", 0, std::numbers::pi / 2, eps,
                               {BC{Side::A, 0, 0.0}, BC{Side::B, 0, 1 - eps / 3},
                                BC{Side::B, 1, -1 + eps / 4}});
            }};
  }
  if (id == "P5") {
    if (!(x_max > 0.0)) throw ValidationError("P5: x_max must be positive");
    return {"P5", ReferenceKind::Oracle, [x_max](double eps) -> AnyProblem {
              return nonlinear(3, "eps*y3 + y2 + eps*(y1^2 + y0) - eps*exp(-2*x)", 0, x_max, eps,
                               {BC{Side::A, 0, 2.0}, BC{Side::A, 1, -1.0}, BC{Side::A, 2, 1.0}});
            }};
  }
  throw ValidationError("unknown builtin problem '" + std::string(id) + "' (expected P1..P5)");
}

std::vector<std::string> builtin_ids() { return {"P1", "P2", "P3", "P4", "P5"}; }

ErrorReport error_norms(const Vector<double>& numerical, const Vector<double>& reference) {
  if (numerical.size() != reference.size()) {
    throw ValidationError("error_norms: length mismatch (" + std::to_string(numerical.size()) + " vs " +
                          std::to_string(reference.size()) + ")");
  }
  ErrorReport r;
  r.n_points = static_cast<std::size_t>(numerical.size());
  r.exact = reference;
  r.numerical = numerical;
  const Vector<double> diff = reference - numerical;
  r.l2 = diff.norm();
  r.linf = diff.size() ? diff.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

SolveOutcome solve_any(const AnyProblem& p, std::size_t n_points, const NewtonConfig& cfg) {
  if (const auto* lp = std::get_if<LinearProblem>(&p)) return {solve_linear(*lp, n_points), std::nullopt};
  auto res = newton_solve(std::get<NonlinearProblem>(p), n_points, cfg);
  if (!res.report.converged) {
    throw ConvergenceError("newton: not converged after " + std::to_string(res.report.iterations) +
                           " iterations, residual " + std::to_string(res.report.final_residual));
  }
  return {std::move(res.solution), std::move(res.report)};
}

OraclePair oracle_pair(const BenchProblem& p, const std::vector<double>& at, double epsilon) {
  const AnyProblem problem = p.make(epsilon);
  OraclePair out;
  // Collocation route: start at twice the requested size and grow by half
  // until two successive interpolants agree, so the route is self-converged
  // rather than merely finer.
  auto collocate = [&](std::size_t n) {
    if (const auto* lp = std::get_if<LinearProblem>(&problem)) return interpolate(solve_linear(*lp, n), at);
    // The residual floor of the collocated equations grows like n^6 * eps, so
    // on fine grids Newton stalls just above the default tolerance. A stalled
    // iterate is still usable here: self-convergence and agreement with the
    // integrator are what certify this route.
    NewtonConfig cfg;
    cfg.max_iterations = 20;
    const auto res = newton_solve(std::get<NonlinearProblem>(problem), n, cfg);
    if (!res.report.converged && !(res.report.final_residual <= kStalledResidual)) {
      throw ConvergenceError("collocation reference: newton failed at " + std::to_string(n) + " nodes, residual " +
                             std::to_string(res.report.final_residual));
    }
    return interpolate(res.solution, at);
  };
  std::size_t n = 2 * std::max<std::size_t>(at.size(), 5);
  std::vector<double> prev = collocate(n);
  for (;;) {
    const std::size_t next = n + n / 2;
    if (next > kMaxOracleNodes) {
      throw OracleError(p.id + " eps=" + std::to_string(epsilon) + ": collocation reference not self-converged at " +
                        std::to_string(n) + " nodes");
    }
    std::vector<double> cur = collocate(next);
    double change = 0.0;
    for (std::size_t i = 0; i < at.size(); ++i) change = std::max(change, std::abs(cur[i] - prev[i]));
    prev = std::move(cur);
    n = next;
    if (change <= kSelfConvergence) break;
  }
  out.collocation = std::move(prev);
  out.collocation_nodes = n;
  out.shooting = shoot(residual_form(problem), at).values;
  for (std::size_t i = 0; i < at.size(); ++i) {
    out.disagreement = std::max(out.disagreement, std::abs(out.collocation[i] - out.shooting[i]));
  }
  return out;
}

std::vector<double> reference(const BenchProblem& p, const std::vector<double>& at, double epsilon) {
  if (p.id == "P1") return p1_exact(at, epsilon);
  if (p.id == "P3") return p3_exact(at, epsilon);
  const auto pair = oracle_pair(p, at, epsilon);
  if (!(pair.disagreement <= kOracleAgreement)) {
    throw OracleError(p.id + " eps=" + std::to_string(epsilon) + ": collocation and shooting references differ by " +
                      std::to_string(pair.disagreement));
  }
  return pair.shooting;
}

Table run_table(const BenchProblem& p, const std::vector<std::size_t>& n_list, const std::vector<double>& eps_list) {
  if (n_list.empty() || eps_list.empty()) throw ValidationError("run_table: empty N or epsilon list");
  Table t;
  t.problem = p.id;
  t.n_list = n_list;
  t.eps_list = eps_list;

  auto run_cell = [&p](std::size_t n, double eps) {
    TableCell cell;
    cell.n_points = n;
    cell.epsilon = eps;
    try {
      const auto outcome = solve_any(p.make(eps), n);
      const auto& nodes = outcome.solution.grid.nodes;
      const std::vector<double> at(nodes.data(), nodes.data() + nodes.size());
      const auto ref = reference(p, at, eps);
      ErrorReport r = error_norms(outcome.solution.values, Eigen::Map<const Vector<double>>(ref.data(), ref.size()));
      r.epsilon = eps;
      cell.report = std::move(r);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    return cell;
  };

  std::vector<std::future<TableCell>> pending;
  for (std::size_t n : n_list) {
    for (double eps : eps_list) pending.push_back(std::async(std::launch::async, run_cell, n, eps));
  }
  for (auto& f : pending) t.cells.push_back(f.get());
  return t;
}

}  // namespace dqm
