#pragma once

// Random generators and reference computations shared by the unit tests and
// the acceptance runner. Reference computations work on Kraus operators and
// plain matrices, never on the library's Choi routines.

#include "cpt/locc.hpp"
#include "cpt/quantum.hpp"
#include "cpt/random.hpp"
#include "cpt/states.hpp"
#include "cpt/system_type.hpp"

#include <Eigen/Eigenvalues>

#include <random>
#include <vector>

namespace cpt::testing {

inline SystemType random_system_type(std::mt19937_64& rng, Index max_factors = 3, Index max_size = 3) {
  std::vector<Factor> factors;
  const Index n = random_index(max_factors + 1, rng);
  for (Index k = 0; k < n; ++k) {
    const Index size = 1 + random_index(max_size, rng);
    factors.push_back(random_index(2, rng) == 0 ? classical(size) : quantum(size));
  }
  return SystemType(factors);
}

/// Kraus operators of a normalised instrument: kraus[y][x] sum to the identity
/// over y for each x.
using KrausFamily = std::vector<std::vector<std::vector<CMatrix>>>;

inline KrausFamily random_instrument_kraus(Index x_size, Index y_size, Index din, Index dout,
                                           std::mt19937_64& rng) {
  KrausFamily k(y_size, std::vector<std::vector<CMatrix>>(x_size));
  const Index env = 1 + random_index(2, rng);
  const Index rows = y_size * env * dout;
  const Index pad = rows < din ? (din + rows - 1) / rows : 1;
  for (Index x = 0; x < x_size; ++x) {
    const Index total = rows * pad;
    const CMatrix g = random_ginibre(total, din, rng);
    const CMatrix v = Eigen::HouseholderQR<CMatrix>(g).householderQ() *
                      CMatrix::Identity(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(din));
    for (Index y = 0; y < y_size; ++y)
      for (Index e = 0; e < env * pad; ++e)
        k[y][x].push_back(v.block(static_cast<Eigen::Index>((y * env * pad + e) * dout), 0,
                                  static_cast<Eigen::Index>(dout), static_cast<Eigen::Index>(din)));
  }
  return k;
}

inline HybridProcess from_kraus_family(const SystemType& s, const SystemType& t, const KrausFamily& k) {
  HybridProcess::Components comps;
  for (Index y = 0; y < k.size(); ++y)
    for (Index x = 0; x < k[y].size(); ++x)
      if (!k[y][x].empty()) comps.emplace(HybridProcess::Key{y, x},
                                          choi_from_kraus(k[y][x], s.quantum_dim(), t.quantum_dim()));
  return HybridProcess(s, t, comps);
}

/// Normalised with probability 1/2, otherwise an arbitrary CP family with
/// some zero components.
inline HybridProcess random_hybrid(const SystemType& s, const SystemType& t, std::mt19937_64& rng) {
  if (random_index(2, rng) == 0)
    return from_kraus_family(
        s, t, random_instrument_kraus(s.classical_size(), t.classical_size(), s.quantum_dim(), t.quantum_dim(), rng));
  HybridProcess::Components comps;
  const Index n = s.quantum_dim() * t.quantum_dim();
  for (Index y = 0; y < t.classical_size(); ++y)
    for (Index x = 0; x < s.classical_size(); ++x)
      if (random_index(4, rng) != 0)
        comps.emplace(HybridProcess::Key{y, x},
                      ChoiMatrix(random_psd(n, 1 + random_index(n, rng), rng), s.quantum_dim(), t.quantum_dim()));
  if (comps.empty())
    comps.emplace(HybridProcess::Key{0, 0},
                  ChoiMatrix(random_psd(n, 1, rng), s.quantum_dim(), t.quantum_dim()));
  return HybridProcess(s, t, comps);
}

inline CMatrix apply_kraus(const std::vector<CMatrix>& k, const CMatrix& rho) {
  CMatrix out = CMatrix::Zero(k.front().rows(), k.front().rows());
  for (const auto& m : k) out += m * rho * m.adjoint();
  return out;
}

inline CMatrix apply_kraus_adjoint(const std::vector<CMatrix>& k, const CMatrix& rho) {
  CMatrix out = CMatrix::Zero(k.front().cols(), k.front().cols());
  for (const auto& m : k) out += m.adjoint() * rho * m;
  return out;
}

inline CMatrix random_density(Index dim, std::mt19937_64& rng) {
  CMatrix r = random_psd(dim, dim, rng);
  return r / r.trace().real();
}

/// Number of eigenvalues above rel * largest.
inline Index eigen_rank(const CMatrix& m, Real rel = kRankThreshold) {
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  const RVector ev = es.eigenvalues();
  const Real top = ev.cwiseAbs().maxCoeff();
  Index r = 0;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (ev(k) > rel * top) ++r;
  return r;
}

/// Largest eigenvalue of the reduced state across `left | rest`: a direct
/// upper bound on the fidelity of any product state with psi.
inline Real max_product_overlap_bound(const CVector& psi, Index left, Index right) {
  const Eigen::Map<const CMatrix> m(psi.data(), static_cast<Eigen::Index>(right), static_cast<Eigen::Index>(left));
  const Eigen::JacobiSVD<CMatrix> svd(m);
  const Real s = svd.singularValues()(0);
  return s * s / psi.squaredNorm();
}

}  // namespace cpt::testing
