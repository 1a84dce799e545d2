#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dqm/chebgrid.hpp"
#include "dqm/errors.hpp"

namespace dqm {

/// Packed partial-pivoting LU: P A = L U with unit-diagonal L stored below
/// the diagonal of `lu` and U on and above it.
template <typename Scalar>
struct LuFactors {
  Matrix<Scalar> lu;
  // perm[i] is the row of A that ended up in row i.
  std::vector<Eigen::Index> perm;
  // max|U| / max|A|.
  Scalar growth = Scalar(1);
  Scalar norm_inf = Scalar(0);
  Matrix<Scalar> original;

  Eigen::Index size() const { return lu.rows(); }
  Matrix<Scalar> lower() const {
    Matrix<Scalar> l = lu.template triangularView<Eigen::StrictlyLower>();
    l.diagonal().setOnes();
    return l;
  }
  Matrix<Scalar> upper() const { return lu.template triangularView<Eigen::Upper>(); }
  Matrix<Scalar> permuted(const Matrix<Scalar>& a) const {
    Matrix<Scalar> pa(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) pa.row(i) = a.row(perm[static_cast<std::size_t>(i)]);
    return pa;
  }
};

template <typename Scalar>
struct LuSolveResult {
  Vector<Scalar> x;
  // ||A x - rhs||_inf against the unfactored matrix.
  Scalar residual_inf = Scalar(0);
};

template <typename Derived>
typename Derived::Scalar norm_inf(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.size() == 0) return Scalar(0);
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Partial-pivoting LU. A pivot with magnitude <= 1e3 * eps * ||A||_inf is
/// reported as singular.
template <typename Scalar>
LuFactors<Scalar> lu_factor(const Matrix<Scalar>& a) {
  if (a.rows() != a.cols()) {
    throw ValidationError("lu_factor: matrix must be square, got " + std::to_string(a.rows()) +
                          "x" + std::to_string(a.cols()));
  }
  const Eigen::Index n = a.rows();
  LuFactors<Scalar> f;
  f.original = a;
  f.lu = a;
  f.perm.resize(static_cast<std::size_t>(n));
  std::iota(f.perm.begin(), f.perm.end(), Eigen::Index{0});
  f.norm_inf = norm_inf(a);
  const Scalar threshold =
      Scalar(1e3) * std::numeric_limits<Scalar>::epsilon() * f.norm_inf;
  const Scalar max_a = n > 0 ? a.cwiseAbs().maxCoeff() : Scalar(0);

  auto& lu = f.lu;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    Scalar best = std::abs(lu(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const Scalar v = std::abs(lu(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best > threshold)) {
      throw SingularMatrixError(static_cast<std::size_t>(k),
                                "lu_factor: singular matrix, pivot " + std::to_string(k) +
                                    " below threshold");
    }
    if (p != k) {
      lu.row(k).swap(lu.row(p));
      std::swap(f.perm[static_cast<std::size_t>(k)], f.perm[static_cast<std::size_t>(p)]);
    }
    const Scalar pivot = lu(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const Scalar l = lu(i, k) / pivot;
      lu(i, k) = l;
      if (l != Scalar(0)) {
        lu.row(i).tail(n - k - 1) -= l * lu.row(k).tail(n - k - 1);
      }
    }
  }
  if (n > 0 && max_a > Scalar(0)) {
    f.growth = f.upper().cwiseAbs().maxCoeff() / max_a;
  }
  return f;
}

template <typename Scalar>
LuSolveResult<Scalar> lu_solve(const LuFactors<Scalar>& f, const Vector<Scalar>& rhs) {
  const Eigen::Index n = f.size();
  if (rhs.size() != n) {
    throw ValidationError("lu_solve: rhs has length " + std::to_string(rhs.size()) +
                          ", expected " + std::to_string(n));
  }
  Vector<Scalar> y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar s = rhs[f.perm[static_cast<std::size_t>(i)]];
    for (Eigen::Index j = 0; j < i; ++j) s -= f.lu(i, j) * y[j];
    y[i] = s;
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    Scalar s = y[i];
    for (Eigen::Index j = i + 1; j < n; ++j) s -= f.lu(i, j) * y[j];
    y[i] = s / f.lu(i, i);
  }
  LuSolveResult<Scalar> r;
  r.residual_inf = n > 0 ? (f.original * y - rhs).cwiseAbs().maxCoeff() : Scalar(0);
  r.x = std::move(y);
  return r;
}

/// ||A||_inf * ||A^{-1}||_inf with the inverse formed from the factors.
template <typename Scalar>
Scalar condition_estimate(const LuFactors<Scalar>& f) {
  const Eigen::Index n = f.size();
  Matrix<Scalar> inv(n, n);
  Vector<Scalar> e = Vector<Scalar>::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e.setZero();
    e[j] = Scalar(1);
    inv.col(j) = lu_solve(f, e).x;
  }
  return f.norm_inf * norm_inf(inv);
}

}  // namespace dqm
