#pragma once

// LOCC instruments and multi-round protocols: evaluation, time reversal, the
// distinguishing and preparation checks, and the product-state constructions.
//
// A protocol with R rounds is the sequence
//   G_1, L_1, G_2, L_2, ..., G_R, L_R, post
// where each G_r is a global classical operation on the parties' classical
// wires and L_r is a product of one local instrument per party. Quantum wires
// pass the global operations untouched. Classical multi-indices over the
// parties put party 0 most significant.

#include "cpt/classical.hpp"
#include "cpt/linalg.hpp"
#include "cpt/quantum.hpp"
#include "cpt/states.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cpt {

/// Non-negative matrix on the parties' joint classical wires; need not be stochastic.
using GlobalClassicalOp = ClassicalProcess<Real>;

/// Party `party`'s instrument: classical input X_i and quantum H_i to
/// classical output Y_i and quantum K_i. May be unnormalised.
struct LocalInstrument {
  Index party = 0;
  HybridProcess process;

  Index classical_in() const { return process.classical_in(); }
  Index classical_out() const { return process.classical_out(); }
  Index quantum_in() const { return process.quantum_in(); }
  Index quantum_out() const { return process.quantum_out(); }
};

/// Builds a local instrument from Kraus lists per (y, x).
LocalInstrument local_instrument_from_kraus(
    Index party, Index classical_in, Index classical_out, Index quantum_in, Index quantum_out,
    const std::map<HybridProcess::Key, std::vector<CMatrix>>& kraus);

struct LoccRound {
  /// For the first round this acts on the protocol's classical input (a
  /// shared classical state when that input is trivial).
  GlobalClassicalOp global;
  std::vector<LocalInstrument> locals;
};

class LoccProtocol {
 public:
  /// Checks that classical and quantum wires chain round to round; the error
  /// names the round and party at fault. Global operations are re-typed with
  /// one classical factor per party.
  LoccProtocol(std::vector<LoccRound> rounds, GlobalClassicalOp post, bool discard_quantum = true);

  const std::vector<LoccRound>& rounds() const { return rounds_; }
  const GlobalClassicalOp& post() const { return post_; }
  bool discard_quantum() const { return discard_quantum_; }

  Index parties() const { return rounds_.front().locals.size(); }
  Index classical_input() const { return rounds_.front().global.matrix().cols(); }
  Index classical_output() const { return post_.matrix().rows(); }
  /// Quantum dimension per party before the first round.
  std::vector<Index> input_dims() const;
  /// Quantum dimension per party after the last round.
  std::vector<Index> output_dims() const;

 private:
  std::vector<LoccRound> rounds_;
  GlobalClassicalOp post_;
  bool discard_quantum_ = true;
};

/// pre -> (M_1 (x) ... (x) M_N) -> post as one process. Its source is the
/// classical input of `pre` followed by the parties' quantum inputs; its
/// target is the classical output of `post` followed by their quantum outputs.
HybridProcess assemble_instrument(const GlobalClassicalOp& pre,
                                  const std::vector<LocalInstrument>& locals,
                                  const GlobalClassicalOp& post);

/// The whole protocol as one process, residual quantum outputs traced when
/// the protocol discards them.
HybridProcess to_process(const LoccProtocol& protocol);

/// Runs the protocol on classical input `x` and joint quantum input `rho` by
/// branching simulation. Entry z is the unnormalised residual quantum state
/// for classical output z.
std::vector<CMatrix> evaluate(const LoccProtocol& protocol, Index x, const CMatrix& rho);

/// Outcome weights over the label set for the shared state `psi`.
RVector apply_protocol(const LoccProtocol& protocol, const PureState& psi);

struct LabelCheck {
  std::string label;
  /// Max-norm distance from the target (delta_b, or psi_b psi_b^dagger).
  Real deviation = 0;
  /// Trace distance to psi_b psi_b^dagger; preparation checks only.
  Real trace_distance = 0;
};

struct VerificationReport {
  std::vector<LabelCheck> labels;
  Real max_deviation = 0;
  bool pass = false;
  /// Non-empty when the protocol's shape does not fit the family.
  std::string shape_error;

  std::vector<std::string> failing_labels(Real tol) const;
};

VerificationReport verify_distinguishing(const LoccProtocol& protocol,
                                         const OrthonormalFamily& family,
                                         Real tol = kDefaultTolerance);

/// Daggers every local instrument, transposes every global operation and
/// reverses the order. Residual quantum outputs that the protocol discards
/// are first folded into its last local instruments.
LoccProtocol reverse_protocol(const LoccProtocol& protocol);

/// Feeds delta_b in and compares the prepared state with psi_b psi_b^dagger.
VerificationReport verify_preparation(const LoccProtocol& protocol,
                                      const OrthonormalFamily& family,
                                      Real tol = kDefaultTolerance);

/// Weighted sum of products of local pure states.
struct ProductMixture {
  struct Term {
    Real weight;
    std::vector<CVector> locals;
  };
  std::vector<Term> terms;
  /// Local dimensions, so that an empty mixture still has a shape.
  std::vector<Index> dims;

  Real total_weight() const;
  CMatrix density() const;
  /// <psi| rho |psi> / (tr rho * |psi|^2); zero for an empty mixture.
  Real fidelity(const CVector& psi) const;
};

/// Expands the preparation-direction protocol's output on delta_b by summing
/// over every internal classical wire value, then splits each local output
/// into its eigenvectors.
ProductMixture expand_as_product_mixture(const LoccProtocol& protocol, Index label);

/// One round: copy the label to every party, each party prepares its factor.
LoccProtocol build_product_preparation(const OrthonormalFamily& family,
                                       Real tol = kDefaultTolerance);
LoccProtocol build_product_distinguisher(const OrthonormalFamily& family,
                                         Real tol = kDefaultTolerance);

enum class Verdict { ConsistentDistinguishes, Contradiction, Inconclusive };

struct TheoremVerdict {
  Verdict verdict = Verdict::Inconclusive;
  FamilyReport family;
  VerificationReport verification;
  std::vector<std::string> failing_labels;
  /// Set for Contradiction: the entangled member and the expansion of the
  /// reversed protocol on it.
  std::string evidence_label;
  std::optional<ProductMixture> evidence;
};

TheoremVerdict theorem_check(const LoccProtocol& protocol, const OrthonormalFamily& family,
                             Real tol = kDefaultTolerance);

/// sum_b prior(b) * P(label b | psi_b). Requires a normalised protocol.
Real success_probability(const LoccProtocol& protocol, const OrthonormalFamily& family,
                         const RVector& prior);

/// Process-level equality of two protocols' round structure.
bool protocols_equal(const LoccProtocol& a, const LoccProtocol& b, Real tol);

}  // namespace cpt
