#pragma once

// Multipartite pure states, labelled families of them, and the
// product/entangled dichotomy.

#include "cpt/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cpt {

/// Local dimensions of parties 0..N-1; party 0 is the most significant factor.
class PartyPartition {
 public:
  explicit PartyPartition(std::vector<Index> dims);

  const std::vector<Index>& dims() const { return dims_; }
  Index parties() const { return dims_.size(); }
  Index total_dim() const { return product_of(dims_); }

  friend bool operator==(const PartyPartition&, const PartyPartition&) = default;

 private:
  std::vector<Index> dims_;
};

class PureState {
 public:
  PureState(CVector amplitudes, PartyPartition partition);

  const CVector& amplitudes() const { return amplitudes_; }
  const PartyPartition& partition() const { return partition_; }
  CMatrix density() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  CVector amplitudes_;
  PartyPartition partition_;
};

/// Labelled pure states on a common partition. Completeness and
/// orthonormality are checked by check_family, not enforced here, so that
/// violations can be reported.
struct OrthonormalFamily {
  PartyPartition partition;
  std::vector<std::string> labels;
  std::vector<PureState> states;

  Index size() const { return states.size(); }
  /// Position of `label`, throwing if absent.
  Index index_of(const std::string& label) const;
};

/// Local factors psi_{b,0}, ..., psi_{b,N-1}; all but the last are unit vectors.
struct ProductFactorization {
  std::vector<CVector> factors;
};

/// Kronecker product of local vectors, party 0 most significant.
CVector tensor_all(const std::vector<CVector>& factors);

/// Rank of the amplitude matrix across `cut | rest`.
Index schmidt_rank(const PureState& psi, const std::vector<Index>& cut, Real tol = kRankThreshold);

/// Schmidt coefficients across the cut, descending.
RVector schmidt_coefficients(const PureState& psi, const std::vector<Index>& cut);

/// Peels parties left to right with rank-one SVDs. Empty when any sequential
/// cut has rank >= 2 or the recomposition misses by more than `tol`.
std::optional<ProductFactorization> product_factorize(const PureState& psi,
                                                      Real tol = kDefaultTolerance);

struct FamilyMember {
  std::string label;
  bool product = false;
  /// Largest Schmidt rank over the sequential cuts {0..k} | {k+1..N-1}.
  Index max_schmidt_rank = 1;
  /// First sequential cut (number of parties on the left) with rank >= 2.
  Index entangled_cut = 0;
};

struct FamilyReport {
  bool complete = false;
  Index expected_size = 0;
  Index actual_size = 0;
  bool orthonormal = false;
  Real gram_deviation = 0;
  bool partitions_consistent = true;
  std::vector<FamilyMember> members;

  bool valid() const { return complete && orthonormal && partitions_consistent; }
  bool all_product() const;
  std::vector<std::string> entangled_labels() const;
};

FamilyReport check_family(const OrthonormalFamily& family, Real tol = kDefaultTolerance);

}  // namespace cpt
