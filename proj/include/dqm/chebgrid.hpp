#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "dqm/errors.hpp"

namespace dqm {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Chebyshev-Gauss-Lobatto collocation grid on an interval [a, b].
///
/// The canonical points xi_i = cos(i*pi/M), M = n_points - 1, run from +1
/// down to -1. The affine map x = (b - a)/2 * (1 - xi) + a sends xi_i to an
/// ascending sequence, so `nodes[k]` is the image of `canonical_nodes[k]`.
/// On [-1, 1] this gives nodes[k] = -xi_k.
///
/// `scale` is dt/dx for the ascending reference coordinate t = -xi; a
/// derivative matrix of order n built on the [-1, 1] grid becomes the one on
/// [a, b] after multiplication by scale^n.
template <typename Scalar>
struct Grid {
  std::size_t n_points = 0;
  Vector<Scalar> nodes;
  Vector<Scalar> angles;
  Vector<Scalar> canonical_nodes;
  Scalar a = Scalar(-1);
  Scalar b = Scalar(1);
  Scalar scale = Scalar(1);

  std::size_t degree() const { return n_points - 1; }
  bool is_canonical() const { return a == Scalar(-1) && b == Scalar(1); }

  /// Position of x in the ascending reference coordinate t in [-1, 1].
  Scalar to_reference(Scalar x) const {
    return Scalar(2) * (x - a) / (b - a) - Scalar(1);
  }
};

template <typename Scalar = double>
Grid<Scalar> gauss_lobatto(std::size_t n_points) {
  if (n_points < 2) {
    throw ValidationError("gauss_lobatto: n_points must be at least 2, got " +
                          std::to_string(n_points));
  }
  const auto m = static_cast<Scalar>(n_points - 1);
  const auto pi = std::numbers::pi_v<Scalar>;

  Grid<Scalar> g;
  g.n_points = n_points;
  g.angles.resize(n_points);
  g.canonical_nodes.resize(n_points);
  g.nodes.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const Scalar theta = static_cast<Scalar>(i) * pi / m;
    g.angles[i] = theta;
    g.canonical_nodes[i] = std::cos(theta);
    g.nodes[i] = -g.canonical_nodes[i];
  }
  g.nodes[0] = Scalar(-1);
  g.nodes[n_points - 1] = Scalar(1);
  return g;
}

/// Maps a [-1, 1] grid onto [a, b].
template <typename Scalar>
Grid<Scalar> map_to_interval(const Grid<Scalar>& g, Scalar a, Scalar b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ValidationError("map_to_interval: requires finite a < b");
  }
  if (!g.is_canonical()) {
    throw ValidationError("map_to_interval: source grid must be on [-1, 1]");
  }
  Grid<Scalar> out = g;
  out.a = a;
  out.b = b;
  out.scale = Scalar(2) / (b - a);
  const Scalar half = (b - a) / Scalar(2);
  for (std::size_t k = 0; k < g.n_points; ++k) {
    out.nodes[k] = half * (Scalar(1) - g.canonical_nodes[k]) + a;
  }
  out.nodes[0] = a;
  out.nodes[g.n_points - 1] = b;
  return out;
}

template <typename Scalar = double>
Grid<Scalar> make_grid(std::size_t n_points, Scalar a, Scalar b) {
  auto g = gauss_lobatto<Scalar>(n_points);
  if (a == Scalar(-1) && b == Scalar(1)) return g;
  return map_to_interval(g, a, b);
}

}  // namespace dqm
