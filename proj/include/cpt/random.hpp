#pragma once

// Seeded samplers shared by the corpus generators, the refutation suite and
// the tests.

#include "cpt/linalg.hpp"

#include <random>

namespace cpt {

template <typename Rng>
CMatrix random_ginibre(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<Real> normal(0.0, 1.0);
  CMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index c = 0; c < g.cols(); ++c)
    for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = Complex(normal(rng), normal(rng));
  return g;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
template <typename Rng>
CMatrix random_unitary(Index dim, Rng& rng) {
  const CMatrix g = random_ginibre(dim, dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const Complex d = r(k, k);
    q.col(k) *= d / std::abs(d);
  }
  return q;
}

template <typename Rng>
CVector random_unit_vector(Index dim, Rng& rng) {
  CVector v = random_ginibre(dim, 1, rng);
  return v / v.norm();
}

/// Positive semidefinite matrix of rank `rank` (generically).
template <typename Rng>
CMatrix random_psd(Index dim, Index rank, Rng& rng) {
  const CMatrix g = random_ginibre(dim, rank, rng);
  return g * g.adjoint();
}

/// Column-stochastic matrix with uniformly drawn columns.
template <typename Rng>
RMatrix random_stochastic(Index rows, Index cols, Rng& rng) {
  std::exponential_distribution<Real> expo(1.0);
  RMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = expo(rng);
    m.col(c) /= m.col(c).sum();
  }
  return m;
}

template <typename Rng>
Index random_index(Index n, Rng& rng) {
  return std::uniform_int_distribution<Index>(0, n - 1)(rng);
}

}  // namespace cpt
