#include "cpt/corpus.hpp"

#include "cpt/errors.hpp"
#include "cpt/random.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numbers>

namespace cpt {

namespace {

CVector ket(Index dim, Index k) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(k)) = 1;
  return v;
}

CVector superpose(const CVector& a, const CVector& b, Real sign) {
  return (a + sign * b) / std::numbers::sqrt2;
}

OrthonormalFamily family_of(const std::vector<Index>& dims,
                            const std::vector<std::pair<std::string, CVector>>& members) {
  OrthonormalFamily f{PartyPartition(dims), {}, {}};
  for (const auto& [label, v] : members) {
    f.labels.push_back(label);
    f.states.emplace_back(v, f.partition);
  }
  return f;
}

CMatrix fourier(Index d) {
  CMatrix f(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const Real norm = 1.0 / std::sqrt(static_cast<Real>(d));
  for (Index j = 0; j < d; ++j)
    for (Index k = 0; k < d; ++k)
      f(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          norm * std::polar(1.0, 2 * std::numbers::pi * static_cast<Real>(j * k) / static_cast<Real>(d));
  return f;
}

// Projective measurement in the basis of the columns of u; the post-measurement
// state stays with the party.
LocalInstrument measurement(Index party, Index classical_in, const std::vector<CMatrix>& bases) {
  const Index d = static_cast<Index>(bases.front().rows());
  std::map<HybridProcess::Key, std::vector<CMatrix>> kraus;
  for (Index x = 0; x < classical_in; ++x)
    for (Index y = 0; y < d; ++y) {
      const CVector e = ket(d, y);
      kraus[{y, x}] = {e * e.adjoint() * bases[x].adjoint()};
    }
  return local_instrument_from_kraus(party, classical_in, d, d, d, kraus);
}

LocalInstrument idle(Index party, Index classical_in, Index dim) {
  std::map<HybridProcess::Key, std::vector<CMatrix>> kraus;
  for (Index x = 0; x < classical_in; ++x)
    kraus[{0, x}] = {CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))};
  return local_instrument_from_kraus(party, classical_in, 1, dim, dim, kraus);
}

// Passes its classical input through unchanged.
LocalInstrument echo(Index party, Index values, Index dim) {
  std::map<HybridProcess::Key, std::vector<CMatrix>> kraus;
  for (Index x = 0; x < values; ++x)
    kraus[{x, x}] = {CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))};
  return local_instrument_from_kraus(party, values, values, dim, dim, kraus);
}

GlobalClassicalOp shared_state(const RMatrix& distribution) {
  return GlobalClassicalOp(SystemType{},
                           SystemType{classical(static_cast<Index>(distribution.rows()))},
                           distribution);
}

GlobalClassicalOp trivial_start() { return shared_state(RMatrix::Ones(1, 1)); }

}  // namespace

OrthonormalFamily computational_family(const std::vector<Index>& dims) {
  const Index total = product_of(dims);
  std::vector<std::pair<std::string, CVector>> members;
  for (Index k = 0; k < total; ++k) {
    std::string label;
    for (Index digit : unflatten(k, dims)) label += std::to_string(digit);
    members.emplace_back(label, ket(total, k));
  }
  return family_of(dims, members);
}

OrthonormalFamily bell_family() {
  const CVector e00 = ket(4, 0), e01 = ket(4, 1), e10 = ket(4, 2), e11 = ket(4, 3);
  return family_of({2, 2}, {{"phi+", superpose(e00, e11, 1)},
                            {"phi-", superpose(e00, e11, -1)},
                            {"psi+", superpose(e01, e10, 1)},
                            {"psi-", superpose(e01, e10, -1)}});
}

OrthonormalFamily four_state_family() {
  const CVector e00 = ket(4, 0), e01 = ket(4, 1), e10 = ket(4, 2), e11 = ket(4, 3);
  return family_of({2, 2}, {{"0", e00},
                            {"1", e11},
                            {"+", superpose(e01, e10, 1)},
                            {"-", superpose(e01, e10, -1)}});
}

OrthonormalFamily plus_minus_family() {
  const CVector plus = superpose(ket(2, 0), ket(2, 1), 1);
  const CVector minus = superpose(ket(2, 0), ket(2, 1), -1);
  return family_of({2, 2}, {{"0+", kron(ket(2, 0), plus)},
                            {"0-", kron(ket(2, 0), minus)},
                            {"1+", kron(ket(2, 1), plus)},
                            {"1-", kron(ket(2, 1), minus)}});
}

OrthonormalFamily domino_family() {
  const auto k = [](Index i) { return ket(3, i); };
  const auto pair = [](const CVector& a, const CVector& b) { return CVector(kron(a, b)); };
  return family_of({3, 3}, {{"d1", pair(k(1), k(1))},
                            {"d2", pair(k(0), superpose(k(0), k(1), 1))},
                            {"d3", pair(k(0), superpose(k(0), k(1), -1))},
                            {"d4", pair(k(2), superpose(k(1), k(2), 1))},
                            {"d5", pair(k(2), superpose(k(1), k(2), -1))},
                            {"d6", pair(superpose(k(1), k(2), 1), k(0))},
                            {"d7", pair(superpose(k(1), k(2), -1), k(0))},
                            {"d8", pair(superpose(k(0), k(1), 1), k(2))},
                            {"d9", pair(superpose(k(0), k(1), -1), k(2))}});
}

OrthonormalFamily random_product_family(const std::vector<Index>& dims, std::mt19937_64& rng) {
  const std::size_t n = dims.size();
  std::vector<Index> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::pair<std::string, CVector>> members;
  std::vector<CVector> locals(n);
  std::function<void(std::size_t)> grow = [&](std::size_t level) {
    if (level == n) {
      members.emplace_back("b" + std::to_string(members.size()), tensor_all(locals));
      return;
    }
    const Index party = order[level];
    const CMatrix u = random_unitary(dims[party], rng);
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
      locals[party] = u.col(k);
      grow(level + 1);
    }
  };
  grow(0);
  return family_of(dims, members);
}

LoccProtocol with_optimal_post(std::vector<LoccRound> rounds, const OrthonormalFamily& family) {
  std::vector<Index> ys;
  for (const auto& m : rounds.back().locals) ys.push_back(m.classical_out());
  const Index outcomes = product_of(ys);
  const LoccProtocol raw(rounds, GlobalClassicalOp::identity(SystemType::classical_only(ys)));

  RMatrix table(static_cast<Eigen::Index>(outcomes), static_cast<Eigen::Index>(family.size()));
  for (Index b = 0; b < family.size(); ++b)
    table.col(static_cast<Eigen::Index>(b)) = apply_protocol(raw, family.states[b]);

  RMatrix post = RMatrix::Zero(static_cast<Eigen::Index>(family.size()),
                               static_cast<Eigen::Index>(outcomes));
  for (Eigen::Index y = 0; y < table.rows(); ++y) {
    Eigen::Index best = 0;
    for (Eigen::Index b = 1; b < table.cols(); ++b)
      if (table(y, b) > table(y, best) + 1e-12) best = b;
    post(best, y) = 1;
  }
  return LoccProtocol(std::move(rounds),
                      GlobalClassicalOp(SystemType::classical_only(ys),
                                        SystemType{classical(family.size())}, std::move(post)));
}

LoccProtocol local_measurement_protocol(const std::vector<CMatrix>& unitaries,
                                        const OrthonormalFamily& family) {
  LoccRound round{trivial_start(), {}};
  for (std::size_t i = 0; i < unitaries.size(); ++i)
    round.locals.push_back(measurement(i, 1, {unitaries[i]}));
  return with_optimal_post({std::move(round)}, family);
}

std::vector<Candidate> handcrafted_candidates(const OrthonormalFamily& family) {
  const auto& dims = family.partition.dims();
  const std::size_t n = dims.size();
  std::vector<Candidate> out;

  std::vector<CMatrix> z, x, zx;
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = static_cast<Eigen::Index>(dims[i]);
    z.push_back(CMatrix::Identity(d, d));
    x.push_back(fourier(dims[i]));
    zx.push_back(i == 0 ? z.back() : x.back());
  }
  out.push_back({"local_z", "hand-crafted", local_measurement_protocol(z, family), true});
  out.push_back({"local_x", "hand-crafted", local_measurement_protocol(x, family), true});
  out.push_back({"local_zx", "hand-crafted", local_measurement_protocol(zx, family), true});

  if (n >= 2) {
    // Party 0 measures Z and broadcasts; the others pick Z or X on its outcome
    // while party 0 keeps it for the final guess.
    LoccRound first{trivial_start(), {}};
    first.locals.push_back(measurement(0, 1, {z[0]}));
    for (std::size_t i = 1; i < n; ++i) first.locals.push_back(idle(i, 1, dims[i]));

    const Index d0 = dims[0];
    const std::vector<Index> xs(n, d0);
    RMatrix broadcast = RMatrix::Zero(static_cast<Eigen::Index>(product_of(xs)),
                                      static_cast<Eigen::Index>(d0));
    for (Index o = 0; o < d0; ++o) {
      const std::vector<Index> digits(n, o);
      broadcast(static_cast<Eigen::Index>(flatten(digits, xs)), static_cast<Eigen::Index>(o)) = 1;
    }
    LoccRound second{GlobalClassicalOp(broadcast), {}};
    second.locals.push_back(echo(0, d0, d0));
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<CMatrix> choice;
      for (Index o = 0; o < d0; ++o) choice.push_back(o == 0 ? z[i] : x[i]);
      second.locals.push_back(measurement(i, d0, choice));
    }
    out.push_back({"adaptive_z_then_zx", "hand-crafted",
                   with_optimal_post({std::move(first), std::move(second)}, family), false});
  }

  LoccRound blind{trivial_start(), {}};
  for (std::size_t i = 0; i < n; ++i) blind.locals.push_back(idle(i, 1, dims[i]));
  RMatrix guess = RMatrix::Zero(static_cast<Eigen::Index>(family.size()), 1);
  guess(0, 0) = 1;
  out.push_back({"guess_fixed", "hand-crafted",
                 LoccProtocol({std::move(blind)},
                              GlobalClassicalOp(SystemType{}, SystemType{classical(family.size())}, guess)),
                 false});
  return out;
}

Candidate random_candidate(const OrthonormalFamily& family, std::mt19937_64& rng,
                           const std::string& name) {
  const auto& dims = family.partition.dims();
  const std::size_t n = dims.size();
  const Index n_rounds = 1 + random_index(2, rng);
  std::vector<LoccRound> rounds;
  std::vector<Index> prev_ys;
  for (Index r = 0; r < n_rounds; ++r) {
    std::vector<Index> xs(n);
    for (auto& s : xs) s = 1 + random_index(2, rng);
    const auto rows = product_of(xs);
    RMatrix g;
    if (r == 0) {
      g = random_stochastic(rows, 1, rng);
    } else if (random_index(2, rng) == 0) {
      g = random_stochastic(rows, product_of(prev_ys), rng);
    } else {
      // Deterministic communication: each joint outcome picks one setting.
      g = RMatrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(product_of(prev_ys)));
      for (Eigen::Index c = 0; c < g.cols(); ++c) g(static_cast<Eigen::Index>(random_index(rows, rng)), c) = 1;
    }
    LoccRound round{r == 0 ? shared_state(g)
                           : GlobalClassicalOp(SystemType::classical_only(prev_ys),
                                               SystemType::classical_only(xs), g),
                    {}};
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<CMatrix> bases;
      for (Index s = 0; s < xs[i]; ++s) bases.push_back(random_unitary(dims[i], rng));
      round.locals.push_back(measurement(i, xs[i], bases));
    }
    rounds.push_back(std::move(round));
    prev_ys = dims;
  }
  return {name, "random", with_optimal_post(std::move(rounds), family), n_rounds == 1};
}

std::vector<std::string> bundled_scenario_names() {
  return {"computational_2x2", "bell_basis", "four_state_basis", "product_0pm", "domino_3x3"};
}

Scenario bundled_scenario(const std::string& name) {
  Scenario s{name, computational_family({2, 2}), {}, {}};
  const auto add_product_protocols = [&s] {
    s.protocols.push_back({"product_preparation", build_product_preparation(s.family)});
    s.protocols.push_back({"product_distinguisher", build_product_distinguisher(s.family)});
  };
  const auto add_candidates = [&s] {
    for (auto& c : handcrafted_candidates(s.family)) s.protocols.push_back({c.name, c.protocol});
  };
  if (name == "computational_2x2") {
    s.metadata["description"] = "computational basis of two qubits";
    add_product_protocols();
    s.protocols.push_back({"local_z", handcrafted_candidates(s.family).front().protocol});
  } else if (name == "bell_basis") {
    s.family = bell_family();
    s.metadata["description"] = "the four two-qubit Bell states";
    add_candidates();
  } else if (name == "four_state_basis") {
    s.family = four_state_family();
    s.metadata["description"] = "|00>, |11>, (|01> +- |10>)/sqrt2";
    add_candidates();
  } else if (name == "product_0pm") {
    s.family = plus_minus_family();
    s.metadata["description"] = "|0+>, |0->, |1+>, |1->";
    add_product_protocols();
  } else if (name == "domino_3x3") {
    s.family = domino_family();
    s.metadata["description"] = "nine-state 3x3 domino product basis";
    s.protocols.push_back({"local_z", handcrafted_candidates(s.family).front().protocol});
  } else {
    throw PreconditionFailed("unknown bundled scenario '" + name + "'");
  }
  return s;
}

}  // namespace cpt
