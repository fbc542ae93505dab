#pragma once

// The classical model: finite sets as systems, non-negative matrices as
// processes. Header-only so it can be instantiated on any real scalar.

#include "cpt/errors.hpp"
#include "cpt/linalg.hpp"
#include "cpt/linear_combination.hpp"
#include "cpt/system_type.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace cpt {

/// A target.size x source.size matrix with entries in the non-negative reals.
template <typename Scalar = Real>
class ClassicalProcess {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  ClassicalProcess(SystemType source, SystemType target, Matrix matrix)
      : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
    if (!source_.is_classical() || !target_.is_classical())
      throw InvariantViolation("ClassicalProcess: quantum wire in " + source_.to_string() +
                               " -> " + target_.to_string());
    if (static_cast<Index>(matrix_.rows()) != target_.classical_size() ||
        static_cast<Index>(matrix_.cols()) != source_.classical_size())
      throw DimensionMismatch("ClassicalProcess: matrix shape does not match " +
                              source_.to_string() + " -> " + target_.to_string());
    if (matrix_.size() > 0 && !(matrix_.minCoeff() >= Scalar(0)))
      throw InvariantViolation("ClassicalProcess: negative entry");
  }

  /// Convenience for single-factor systems.
  explicit ClassicalProcess(const Matrix& matrix)
      : ClassicalProcess(SystemType{classical(static_cast<Index>(matrix.cols()))},
                         SystemType{classical(static_cast<Index>(matrix.rows()))}, matrix) {}

  static ClassicalProcess identity(const SystemType& s) {
    const auto n = static_cast<Eigen::Index>(s.classical_size());
    return {s, s, Matrix::Identity(n, n)};
  }

  /// The all-ones row vector on `s`.
  static ClassicalProcess discard(const SystemType& s) {
    const auto n = static_cast<Eigen::Index>(s.classical_size());
    return {s, SystemType{}, Matrix::Ones(1, n)};
  }

  /// The point distribution at `index`, scaled by `weight`.
  static ClassicalProcess delta(const SystemType& s, Index index, Scalar weight = Scalar(1)) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(s.classical_size()), 1);
    m(static_cast<Eigen::Index>(index), 0) = weight;
    return {SystemType{}, s, std::move(m)};
  }

  const SystemType& source() const { return source_; }
  const SystemType& target() const { return target_; }
  const Matrix& matrix() const { return matrix_; }
  Scalar operator()(Index y, Index x) const {
    return matrix_(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
  }

 private:
  SystemType source_;
  SystemType target_;
  Matrix matrix_;
};

/// g after f.
template <typename Scalar>
ClassicalProcess<Scalar> compose(const ClassicalProcess<Scalar>& f,
                                 const ClassicalProcess<Scalar>& g) {
  if (!(f.target() == g.source()))
    throw DimensionMismatch("compose: target " + f.target().to_string() +
                            " does not match source " + g.source().to_string());
  // Fixed summation order, so that transposing commutes with composing exactly.
  const auto& a = g.matrix();
  const auto& b = f.matrix();
  typename ClassicalProcess<Scalar>::Matrix out(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Scalar acc(0);
      for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return {f.source(), g.target(), std::move(out)};
}

template <typename Scalar>
ClassicalProcess<Scalar> tensor(const ClassicalProcess<Scalar>& f,
                                const ClassicalProcess<Scalar>& g) {
  return {f.source() * g.source(), f.target() * g.target(), kron(f.matrix(), g.matrix())};
}

/// Time reversal on classical processes is the transpose.
template <typename Scalar>
ClassicalProcess<Scalar> dagger(const ClassicalProcess<Scalar>& f) {
  return {f.target(), f.source(), f.matrix().transpose()};
}

template <typename Scalar>
ClassicalProcess<Scalar> operator+(const ClassicalProcess<Scalar>& f,
                                   const ClassicalProcess<Scalar>& g) {
  if (!(f.source() == g.source()) || !(f.target() == g.target()))
    throw DimensionMismatch("sum of processes " + f.source().to_string() + " -> " +
                            f.target().to_string() + " and " + g.source().to_string() +
                            " -> " + g.target().to_string());
  return {f.source(), f.target(), f.matrix() + g.matrix()};
}

template <typename Scalar>
ClassicalProcess<Scalar> operator*(Scalar weight, const ClassicalProcess<Scalar>& f) {
  if (!(weight >= Scalar(0)))
    throw InvariantViolation("scaling by a negative weight leaves the cone");
  return {f.source(), f.target(), weight * f.matrix()};
}

template <typename Scalar>
Scalar max_norm_distance(const ClassicalProcess<Scalar>& f, const ClassicalProcess<Scalar>& g) {
  if (!(f.source() == g.source()) || !(f.target() == g.target()))
    throw DimensionMismatch("max_norm_distance: types differ");
  return max_abs_diff(f.matrix(), g.matrix());
}

/// Every column sums to one.
template <typename Scalar>
bool is_normalised(const ClassicalProcess<Scalar>& f, Scalar tol) {
  const auto sums = f.matrix().colwise().sum();
  for (Eigen::Index c = 0; c < sums.size(); ++c)
    if (std::abs(sums(c) - Scalar(1)) > tol) return false;
  return true;
}

/// Extremal iff exactly one entry is above `tol`.
template <typename Scalar>
bool is_pure(const ClassicalProcess<Scalar>& f, Scalar tol) {
  const auto nonzero = (f.matrix().array() > tol).count();
  if (nonzero == 0) throw ZeroProcess("is_pure: zero classical process");
  return nonzero == 1;
}

/// Splits an impure classical process into its weighted point masses.
template <typename Scalar>
std::optional<LinearCombination<ClassicalProcess<Scalar>>> impurity_witness(
    const ClassicalProcess<Scalar>& f) {
  using P = ClassicalProcess<Scalar>;
  const auto& m = f.matrix();
  if (m.size() == 0 || m.maxCoeff() == Scalar(0))
    throw ZeroProcess("impurity_witness: zero classical process");
  std::vector<typename LinearCombination<P>::Term> terms;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (m(r, c) == Scalar(0)) continue;
      typename P::Matrix unit = P::Matrix::Zero(m.rows(), m.cols());
      unit(r, c) = Scalar(1);
      terms.push_back({static_cast<Real>(m(r, c)), P(f.source(), f.target(), std::move(unit))});
    }
  if (terms.size() < 2) return std::nullopt;
  return LinearCombination<P>(std::move(terms));
}

/// The pairs (|x>, <x|) whose outer products sum to the identity on `s`.
template <typename Scalar = Real>
std::vector<std::pair<ClassicalProcess<Scalar>, ClassicalProcess<Scalar>>>
identity_resolution(const SystemType& s) {
  std::vector<std::pair<ClassicalProcess<Scalar>, ClassicalProcess<Scalar>>> out;
  for (Index x = 0; x < s.classical_size(); ++x) {
    auto state = ClassicalProcess<Scalar>::delta(s, x);
    out.emplace_back(state, dagger(state));
  }
  return out;
}

}  // namespace cpt
