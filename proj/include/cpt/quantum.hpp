#pragma once

// The quantum model: hybrid classical/quantum systems whose processes are
// classically indexed families of completely positive maps, stored as Choi
// matrices.
//
// Choi convention: for a CP map Phi from dimension dA to dB,
//   J = sum_{j,j'} |j><j'| (x) Phi(|j><j'|),
// an (dA*dB) x (dA*dB) matrix with the input factor most significant. With
// Kraus operators K_k this is sum_k vec(K_k) vec(K_k)^dagger.

#include "cpt/classical.hpp"
#include "cpt/errors.hpp"
#include "cpt/linalg.hpp"
#include "cpt/linear_combination.hpp"
#include "cpt/system_type.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace cpt {

/// Hermiticity tolerance for ingested Choi matrices (relative to max(1, |J|)).
inline constexpr Real kHermitianTolerance = 1e-12;
/// Eigenvalues in [-kPsdTolerance, 0) are clamped; anything lower is rejected.
inline constexpr Real kPsdTolerance = 1e-10;

/// Positive semidefinite matrix representing one CP map.
class ChoiMatrix {
 public:
  /// Validates Hermiticity and positivity, clamping tiny negative eigenvalues.
  ChoiMatrix(CMatrix entries, Index input_dim, Index output_dim);

  /// Builds from a matrix already known to be CP (output of CP-preserving
  /// operations); only symmetrises.
  static ChoiMatrix trusted(CMatrix entries, Index input_dim, Index output_dim);
  static ChoiMatrix zero(Index input_dim, Index output_dim);

  const CMatrix& matrix() const { return entries_; }
  Index input_dim() const { return input_dim_; }
  Index output_dim() const { return output_dim_; }

 private:
  ChoiMatrix() = default;
  CMatrix entries_;
  Index input_dim_ = 1;
  Index output_dim_ = 1;
};

/// Kraus operators (output_dim x input_dim) to Choi form.
ChoiMatrix choi_from_kraus(std::span<const CMatrix> kraus, Index input_dim, Index output_dim);

/// Parallel composition of two CP maps, Choi factors ordered (A1 A2 B1 B2).
ChoiMatrix tensor(const ChoiMatrix& f, const ChoiMatrix& g);

/// Applies a single CP map to an operator on its input space.
CMatrix apply_choi(const ChoiMatrix& choi, const CMatrix& rho);

/// Applies a CP map to factor `party` of an operator on prod(dims); the dims
/// entry for that factor is replaced by the map's output dimension.
CMatrix apply_choi_on_factor(const ChoiMatrix& choi, const CMatrix& rho,
                             std::span<const Index> dims, Index party);

/// A (possibly unnormalised) density operator.
class DensityState {
 public:
  explicit DensityState(CMatrix matrix);
  static DensityState trusted(CMatrix matrix);

  const CMatrix& matrix() const { return matrix_; }
  Index dim() const { return static_cast<Index>(matrix_.rows()); }
  Real trace() const { return matrix_.trace().real(); }

 private:
  DensityState() = default;
  CMatrix matrix_;
};

/// A process in the quantum model. Component (y, x) is the CP map applied
/// when the classical input is x and the classical output is y. Absent
/// components are the zero map.
class HybridProcess {
 public:
  using Key = std::pair<Index, Index>;  // (y, x)
  using Components = std::map<Key, ChoiMatrix>;

  HybridProcess(SystemType source, SystemType target, Components components = {});

  static HybridProcess identity(const SystemType& s);
  /// Trace on quantum factors, all-ones row on classical ones.
  static HybridProcess discard(const SystemType& s);
  static HybridProcess from_classical(const ClassicalProcess<Real>& f);

  const SystemType& source() const { return source_; }
  const SystemType& target() const { return target_; }
  Index classical_in() const { return source_.classical_size(); }
  Index classical_out() const { return target_.classical_size(); }
  Index quantum_in() const { return source_.quantum_dim(); }
  Index quantum_out() const { return target_.quantum_dim(); }

  const Components& components() const { return components_; }
  /// nullptr for a zero component.
  const ChoiMatrix* component(Index y, Index x) const;

 private:
  SystemType source_;
  SystemType target_;
  Components components_;
};

/// g after f, through the Choi link product summed over the shared classical wire.
HybridProcess compose(const HybridProcess& f, const HybridProcess& g);
HybridProcess tensor(const HybridProcess& f, const HybridProcess& g);
/// Adjoint CP maps with transposed classical indices.
HybridProcess dagger(const HybridProcess& f);
HybridProcess operator+(const HybridProcess& f, const HybridProcess& g);
HybridProcess operator*(Real weight, const HybridProcess& f);

/// Max-norm over all Choi entries of f - g.
Real max_norm_distance(const HybridProcess& f, const HybridProcess& g);
bool is_normalised(const HybridProcess& f, Real tol);
/// Exactly one component above `tol`, and its Choi matrix has numerical rank one.
bool is_pure(const HybridProcess& f, Real tol);
/// Eigen-decomposes every component into rank-one CP terms.
std::optional<LinearCombination<HybridProcess>> impurity_witness(const HybridProcess& f);

/// A single CP map from Kraus operators, or the zero map for an empty list.
HybridProcess cp_from_kraus(std::span<const CMatrix> kraus, Index input_dim, Index output_dim);
/// Preparation of the unnormalised pure state v v^dagger.
HybridProcess prepare_pure(const CVector& v);

/// Runs component (y, x) for every y; branch traces are the outcome weights.
std::map<Index, DensityState> apply_to_state(const HybridProcess& f, Index x,
                                             const DensityState& rho);

}  // namespace cpt
