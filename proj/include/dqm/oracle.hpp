#pragma once

#include <vector>

#include "dqm/problem.hpp"

namespace dqm {

/// Reference solutions by adaptive Dormand-Prince 5(4) integration,
/// independent of the collocation machinery.
struct IvpOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
};

/// Integrates residual(x, y0..ym) = 0 from x = a with the given
/// initial state (y, y', .., y^(m-1)) and returns y at each abscissa.
/// Abscissae must be ascending and inside [a, b].
std::vector<double> integrate_ivp(const NonlinearProblem& p, const std::vector<double>& initial_state,
                                  const std::vector<double>& abscissae, const IvpOptions& opt = {});

struct ShootingResult {
  std::vector<double> initial_state;
  std::vector<double> values;
  int iterations = 0;
  double mismatch = 0.0;
};

/// Shooting from x = a: the initial derivatives not fixed by a-side
/// conditions are found by Newton iteration with a finite-difference
/// Jacobian so that the b-side conditions hold. With no b-side conditions
/// this is a single initial-value integration.
ShootingResult shoot(const NonlinearProblem& p, const std::vector<double>& abscissae,
                     const IvpOptions& opt = {});

}  // namespace dqm
