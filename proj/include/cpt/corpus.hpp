#pragma once

// Built-in families, hand-crafted and random candidate protocols, and the
// bundled scenarios.

#include "cpt/locc.hpp"
#include "cpt/scenario.hpp"
#include "cpt/states.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace cpt {

OrthonormalFamily computational_family(const std::vector<Index>& dims);
/// phi+, phi-, psi+, psi-.
OrthonormalFamily bell_family();
/// |00>, |11>, (|01> + |10>)/sqrt2, (|01> - |10>)/sqrt2 labelled 0, 1, +, -.
OrthonormalFamily four_state_family();
/// |0+>, |0->, |1+>, |1->: product but not computational.
OrthonormalFamily plus_minus_family();
/// The nine-state 3x3 product basis built from dominoes on a 3x3 grid.
OrthonormalFamily domino_family();

/// A random complete product basis: parties are visited in a random order and
/// every branch of the resulting tree picks its own Haar-random local basis.
OrthonormalFamily random_product_family(const std::vector<Index>& dims, std::mt19937_64& rng);

struct Candidate {
  std::string name;
  std::string origin;  // "hand-crafted", "random" or "scenario"
  LoccProtocol protocol;
  /// A single round of local projective measurements.
  bool one_round_projective = false;
};

/// Replaces the post-processing by the deterministic outcome-to-label map that
/// maximises the uniform-prior success probability on `family`.
LoccProtocol with_optimal_post(std::vector<LoccRound> rounds, const OrthonormalFamily& family);

/// Measure party i in the basis given by the columns of unitaries[i].
LoccProtocol local_measurement_protocol(const std::vector<CMatrix>& unitaries,
                                        const OrthonormalFamily& family);

std::vector<Candidate> handcrafted_candidates(const OrthonormalFamily& family);

/// One or two rounds of Haar-random local projective measurements with random
/// stochastic classical communication; optimal post-processing.
Candidate random_candidate(const OrthonormalFamily& family, std::mt19937_64& rng,
                           const std::string& name);

std::vector<std::string> bundled_scenario_names();
Scenario bundled_scenario(const std::string& name);

}  // namespace cpt
