#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dqm/chebgrid.hpp"
#include "dqm/errors.hpp"

namespace dqm {

/// Dense weighting-coefficient matrix: (W y)_i approximates y^(order)(x_i).
template <typename Scalar>
struct DiffMatrix {
  int order = 1;
  Matrix<Scalar> weights;
  Grid<Scalar> grid;
};

/// K'(x_j) = prod_{k != j} (x_j - x_k) for each node.
template <typename Scalar>
struct LagrangeBasis {
  Vector<Scalar> node_products;
};

/// Chebyshev expansion sum_k c_k T_k(t) in the reference coordinate of a grid.
template <typename Scalar>
struct ChebFit {
  Vector<Scalar> coefficients;
  Scalar a = Scalar(-1);
  Scalar b = Scalar(1);
};

enum class HigherOrderMethod { MatrixPower, Recurrence };

namespace detail {

// Sets a_ii = -sum_{j != i} a_ij.
template <typename Scalar>
void negative_sum_diagonal(Matrix<Scalar>& w) {
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    Scalar s(0);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (j != i) s += w(i, j);
    }
    w(i, i) = -s;
  }
}

}  // namespace detail

/// First-derivative matrix from the closed-form Chebyshev entries.
///
/// Entries are evaluated on the canonical points and flipped to the ascending
/// coordinate, then scaled by the grid's chain-rule factor. The diagonal is
/// replaced by the negative row sum; the corner values (2M^2+1)/6 come out of
/// that sum up to rounding.
template <typename Scalar>
DiffMatrix<Scalar> first_derivative_explicit(const Grid<Scalar>& g) {
  const auto n = static_cast<Eigen::Index>(g.n_points);
  const Eigen::Index m = n - 1;
  const auto& xi = g.canonical_nodes;
  Matrix<Scalar> w = Matrix<Scalar>::Zero(n, n);
  auto cbar = [m](Eigen::Index i) { return (i == 0 || i == m) ? Scalar(2) : Scalar(1); };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const Scalar sign = ((i + j) % 2 == 0) ? Scalar(1) : Scalar(-1);
      // d/dt = -d/dxi with t = -xi.
      w(i, j) = -(cbar(i) / cbar(j)) * sign / (xi[i] - xi[j]);
    }
  }
  detail::negative_sum_diagonal(w);
  w *= g.scale;
  return {1, std::move(w), g};
}

template <typename Scalar>
LagrangeBasis<Scalar> lagrange_basis(const Grid<Scalar>& g) {
  const auto n = static_cast<Eigen::Index>(g.n_points);
  LagrangeBasis<Scalar> basis;
  basis.node_products.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Scalar p(1);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != j) p *= g.nodes[j] - g.nodes[k];
    }
    if (!std::isfinite(static_cast<double>(p)) || p == Scalar(0)) {
      throw ConstructionError("lagrange_basis: node product K'(x_" + std::to_string(j) +
                              ") is not representable for n_points = " +
                              std::to_string(g.n_points));
    }
    basis.node_products[j] = p;
  }
  return basis;
}

/// First-derivative matrix from Lagrange interpolation on the mapped nodes.
template <typename Scalar>
DiffMatrix<Scalar> first_derivative_lagrange(const Grid<Scalar>& g) {
  const auto basis = lagrange_basis(g);
  const auto& kp = basis.node_products;
  const auto n = static_cast<Eigen::Index>(g.n_points);
  Matrix<Scalar> w = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) w(i, j) = kp[i] / ((g.nodes[i] - g.nodes[j]) * kp[j]);
    }
  }
  detail::negative_sum_diagonal(w);
  return {1, std::move(w), g};
}

/// Order-n matrix (n in 2..4) from an order-1 matrix.
///
/// MatrixPower returns d1^n with the diagonal reset by the negative row sum,
/// which keeps the null vector exact as the entries grow. Recurrence builds each order from the previous:
/// w_ij^(k) = k (w_ii^(k-1) w_ij^(1) - w_ij^(k-1) / (x_i - x_j)), j != i,
/// with the diagonal from the negative row sum.
template <typename Scalar>
DiffMatrix<Scalar> higher_order(const DiffMatrix<Scalar>& d1, int n,
                                HigherOrderMethod method = HigherOrderMethod::MatrixPower) {
  if (n < 2 || n > 4) {
    throw ValidationError("higher_order: derivative order must be in 2..4, got " +
                          std::to_string(n));
  }
  if (d1.order != 1) {
    throw ValidationError("higher_order: input matrix must have order 1");
  }
  if (method == HigherOrderMethod::MatrixPower) {
    Matrix<Scalar> w = d1.weights;
    for (int k = 2; k <= n; ++k) w = (w * d1.weights).eval();
    detail::negative_sum_diagonal(w);
    return {n, std::move(w), d1.grid};
  }

  const auto& x = d1.grid.nodes;
  const auto size = d1.weights.rows();
  Matrix<Scalar> prev = d1.weights;
  Matrix<Scalar> cur(size, size);
  for (int k = 2; k <= n; ++k) {
    for (Eigen::Index i = 0; i < size; ++i) {
      for (Eigen::Index j = 0; j < size; ++j) {
        if (i == j) continue;
        cur(i, j) = Scalar(k) * (prev(i, i) * d1.weights(i, j) - prev(i, j) / (x[i] - x[j]));
      }
    }
    detail::negative_sum_diagonal(cur);
    prev = cur;
  }
  return {n, std::move(prev), d1.grid};
}

/// W^(0) = I followed by W^(1) .. W^(max_order) for a grid.
template <typename Scalar>
std::vector<Matrix<Scalar>> derivative_matrices(const Grid<Scalar>& g, int max_order) {
  if (max_order < 0 || max_order > 4) {
    throw ValidationError("derivative_matrices: order must be in 0..4");
  }
  const auto n = static_cast<Eigen::Index>(g.n_points);
  std::vector<Matrix<Scalar>> out;
  out.reserve(static_cast<std::size_t>(max_order) + 1);
  out.push_back(Matrix<Scalar>::Identity(n, n));
  if (max_order == 0) return out;
  const auto d1 = first_derivative_explicit(g);
  out.push_back(d1.weights);
  for (int k = 2; k <= max_order; ++k) out.push_back(higher_order(d1, k).weights);
  return out;
}

/// Chebyshev coefficients interpolating node samples (discrete cosine identity).
template <typename Scalar>
ChebFit<Scalar> chebyshev_fit(const Vector<Scalar>& samples, const Grid<Scalar>& g) {
  if (static_cast<std::size_t>(samples.size()) != g.n_points) {
    throw ValidationError("chebyshev_fit: expected " + std::to_string(g.n_points) +
                          " samples, got " + std::to_string(samples.size()));
  }
  const auto n = static_cast<Eigen::Index>(g.n_points);
  const Eigen::Index m = n - 1;
  const auto pi = std::numbers::pi_v<Scalar>;
  ChebFit<Scalar> fit;
  fit.a = g.a;
  fit.b = g.b;
  fit.coefficients = Vector<Scalar>::Zero(n);
  if (m == 0) {
    fit.coefficients[0] = samples[0];
    return fit;
  }
  // Ascending node j sits at t_j = cos((M - j) pi / M).
  for (Eigen::Index k = 0; k <= m; ++k) {
    Scalar s(0);
    for (Eigen::Index j = 0; j <= m; ++j) {
      const Eigen::Index phase = (k * (m - j)) % (2 * m);
      const Scalar term = samples[j] * std::cos(static_cast<Scalar>(phase) * pi / Scalar(m));
      s += (j == 0 || j == m) ? term / Scalar(2) : term;
    }
    s *= Scalar(2) / Scalar(m);
    if (k == 0 || k == m) s /= Scalar(2);
    fit.coefficients[k] = s;
  }
  return fit;
}

/// Clenshaw evaluation of a ChebFit at a physical abscissa.
template <typename Scalar>
Scalar evaluate(const ChebFit<Scalar>& fit, Scalar x) {
  const Scalar t = Scalar(2) * (x - fit.a) / (fit.b - fit.a) - Scalar(1);
  Scalar b1(0), b2(0);
  for (Eigen::Index k = fit.coefficients.size() - 1; k >= 1; --k) {
    const Scalar b0 = Scalar(2) * t * b1 - b2 + fit.coefficients[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + fit.coefficients[0];
}

/// Row-major CSV with 17 significant digits.
template <typename Derived>
void write_csv(std::ostream& os, const Eigen::MatrixBase<Derived>& m) {
  char buf[40];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(m(i, j)));
      if (j > 0) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace dqm
