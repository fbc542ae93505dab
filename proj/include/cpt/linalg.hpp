#pragma once

// Small dense helpers over Eigen used by both process models. Everything here
// works on row/column indices laid out with the first subsystem most
// significant, i.e. |i_1 i_2 ... i_n> sits at i_1*(d_2...d_n) + ... + i_n.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace cpt {

using Real = double;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = std::size_t;

/// Default equality tolerance for processes (max-norm of the canonical form).
inline constexpr Real kDefaultTolerance = 1e-9;
/// Singular values below this fraction of the largest count as zero.
inline constexpr Real kRankThreshold = 1e-8;

inline Index product_of(std::span<const Index> dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1},
                         std::multiplies<>());
}

/// Splits a flat index into its multi-index over `dims`.
inline std::vector<Index> unflatten(Index flat, std::span<const Index> dims) {
  std::vector<Index> digits(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    digits[k] = flat % dims[k];
    flat /= dims[k];
  }
  return digits;
}

inline Index flatten(std::span<const Index> digits, std::span<const Index> dims) {
  Index flat = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) flat = flat * dims[k] + digits[k];
  return flat;
}

template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  return m.cwiseAbs().maxCoeff();
}

template <typename DerivedA, typename DerivedB>
auto max_abs_diff(const Eigen::MatrixBase<DerivedA>& a,
                  const Eigen::MatrixBase<DerivedB>& b) {
  return max_abs((a - b).eval());
}

template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a,
          const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::kroneckerProduct(a.eval(), b.eval());
  return out;
}

/// Column-stacking vectorisation: entry (i, j) of an r x c matrix lands at
/// j*r + i, which is the "input major, output minor" ordering used for Choi
/// matrices.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> vec(
    const Eigen::MatrixBase<Derived>& m) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> copy = m;
  return Eigen::Map<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>>(
      copy.data(), copy.size());
}

/// Reorders tensor factors of a square operator on prod(dims). Factor k of
/// the result is factor perm[k] of the input.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
permute_subsystems(const Eigen::MatrixBase<Derived>& m,
                   std::span<const Index> dims, std::span<const Index> perm) {
  const Index total = product_of(dims);
  if (static_cast<Index>(m.rows()) != total || static_cast<Index>(m.cols()) != total)
    throw std::invalid_argument("permute_subsystems: operator size does not match dims");
  std::vector<Index> new_dims(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) new_dims[k] = dims[perm[k]];
  std::vector<Index> source(total);
  std::vector<Index> old_digits(dims.size());
  for (Index n = 0; n < total; ++n) {
    auto digits = unflatten(n, new_dims);
    for (std::size_t k = 0; k < perm.size(); ++k) old_digits[perm[k]] = digits[k];
    source[n] = flatten(old_digits, dims);
  }
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(total, total);
  for (Index c = 0; c < total; ++c)
    for (Index r = 0; r < total; ++r) out(r, c) = m(source[r], source[c]);
  return out;
}

/// Same reordering applied to a state vector.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> permute_vector(
    const Eigen::MatrixBase<Derived>& v, std::span<const Index> dims,
    std::span<const Index> perm) {
  const Index total = product_of(dims);
  std::vector<Index> new_dims(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) new_dims[k] = dims[perm[k]];
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(total);
  std::vector<Index> old_digits(dims.size());
  for (Index n = 0; n < total; ++n) {
    auto digits = unflatten(n, new_dims);
    for (std::size_t k = 0; k < perm.size(); ++k) old_digits[perm[k]] = digits[k];
    out(n) = v(flatten(old_digits, dims));
  }
  return out;
}

/// Traces out the second factor of an operator on dim_a * dim_b.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
trace_second(const Eigen::MatrixBase<Derived>& m, Index dim_a, Index dim_b) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(dim_a, dim_a);
  for (Index a = 0; a < dim_a; ++a)
    for (Index a2 = 0; a2 < dim_a; ++a2)
      for (Index b = 0; b < dim_b; ++b) out(a, a2) += m(a * dim_b + b, a2 * dim_b + b);
  return out;
}

/// Traces out the first factor of an operator on dim_a * dim_b.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
trace_first(const Eigen::MatrixBase<Derived>& m, Index dim_a, Index dim_b) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(dim_b, dim_b);
  for (Index a = 0; a < dim_a; ++a)
    out += m.block(a * dim_b, a * dim_b, dim_b, dim_b);
  return out;
}

/// Number of singular values above `relative` times the largest one.
template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& m,
                     typename Derived::RealScalar relative = kRankThreshold) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>>
      svd(m.eval());
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0) return 0;
  Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > relative * s(0)) ++rank;
  return rank;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m,
                  typename Derived::RealScalar tol) {
  return m.rows() == m.cols() && max_abs_diff(m, m.adjoint()) <= tol;
}

}  // namespace cpt
