#include "dqm/problem.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "dqm/errors.hpp"

namespace dqm {

namespace {

void validate_common(int order, double a, double b, double epsilon,
                     const std::vector<BoundaryCondition>& conditions) {
  if (order < 1 || order > 4) {
    throw ValidationError("problem order must be in 1..4, got " + std::to_string(order));
  }
  if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
    throw ValidationError("problem domain must satisfy a < b");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("epsilon must be positive");
  }
  if (conditions.size() != static_cast<std::size_t>(order)) {
    throw ValidationError("expected " + std::to_string(order) + " conditions, got " +
                          std::to_string(conditions.size()));
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& c : conditions) {
    if (c.derivative_order < 0 || c.derivative_order >= order) {
      throw ValidationError("condition derivative order " + std::to_string(c.derivative_order) +
                            " must be in 0.." + std::to_string(order - 1));
    }
    if (!std::isfinite(c.value)) throw ValidationError("condition value must be finite");
    if (!seen.emplace(static_cast<int>(c.side), c.derivative_order).second) {
      throw ValidationError(std::string("duplicate condition on derivative ") +
                            std::to_string(c.derivative_order) + " at side " +
                            (c.side == Side::A ? "a" : "b"));
    }
  }
}

void require_symbols(const Expr& e, const std::set<Symbol>& allowed, const std::string& what) {
  for (Symbol s : free_symbols(e)) {
    if (!allowed.count(s)) {
      throw ValidationError(what + " references '" + std::string(symbol_name(s)) +
                            "', which is not allowed here");
    }
  }
}

}  // namespace

void validate(const LinearProblem& p) {
  validate_common(p.order, p.a, p.b, p.epsilon, p.conditions);
  const std::set<Symbol> allowed{Symbol::X, Symbol::Eps};
  for (const auto& [k, c] : p.coefficients) {
    if (k < 0 || k > p.order) {
      throw ValidationError("coefficient for derivative " + std::to_string(k) +
                            " exceeds problem order");
    }
    require_symbols(c, allowed, "coefficient " + std::to_string(k));
  }
  require_symbols(p.rhs, allowed, "rhs");
}

void validate(const NonlinearProblem& p) {
  validate_common(p.order, p.a, p.b, p.epsilon, p.conditions);
  std::set<Symbol> allowed{Symbol::X, Symbol::Eps};
  for (int k = 0; k <= p.order; ++k) allowed.insert(derivative_symbol(k));
  require_symbols(p.residual, allowed, "residual");
}

void validate_grid_size(int order, std::size_t n_points) {
  if (n_points < static_cast<std::size_t>(order) + 1) {
    throw ValidationError("n_points = " + std::to_string(n_points) +
                          " is too small for an order-" + std::to_string(order) +
                          " problem (need at least " + std::to_string(order + 1) + ")");
  }
}

std::vector<ConditionRow> condition_rows(const std::vector<BoundaryCondition>& conditions,
                                         std::size_t n_points) {
  std::vector<BoundaryCondition> sorted = conditions;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& l, const auto& r) {
    return l.derivative_order < r.derivative_order;
  });
  std::vector<ConditionRow> rows;
  std::size_t top = 0;
  std::size_t bottom = 0;
  for (const auto& c : sorted) {
    ConditionRow r;
    r.derivative_order = c.derivative_order;
    r.value = c.value;
    if (c.side == Side::A) {
      r.node = 0;
      r.row = top++;
    } else {
      r.node = n_points - 1;
      r.row = n_points - 1 - bottom++;
    }
    rows.push_back(r);
  }
  if (top + bottom > n_points || (bottom > 0 && top > n_points - bottom)) {
    throw ValidationError("boundary conditions collide on the collocation rows");
  }
  return rows;
}

NonlinearProblem as_nonlinear(const LinearProblem& p) {
  NonlinearProblem out;
  out.order = p.order;
  out.a = p.a;
  out.b = p.b;
  out.epsilon = p.epsilon;
  out.conditions = p.conditions;
  Expr sum = Expr::number(0.0);
  bool first = true;
  for (const auto& [k, c] : p.coefficients) {
    Expr term = c * Expr::symbol(derivative_symbol(k));
    sum = first ? term : sum + term;
    first = false;
  }
  out.residual = sum - p.rhs;
  return out;
}

}  // namespace dqm
