#include "cpt/locc.hpp"

#include "cpt/errors.hpp"

#include <Eigen/Eigenvalues>

#include <functional>
#include <sstream>
#include <unordered_set>

namespace cpt {

namespace {

using ByInput = std::vector<std::vector<std::pair<Index, const ChoiMatrix*>>>;

ByInput index_by_input(const LocalInstrument& m) {
  ByInput out(m.classical_in());
  for (const auto& [key, choi] : m.process.components())
    out[key.second].emplace_back(key.first, &choi);
  return out;
}

std::vector<ByInput> index_locals(const std::vector<LocalInstrument>& locals) {
  std::vector<ByInput> out;
  out.reserve(locals.size());
  for (const auto& m : locals) out.push_back(index_by_input(m));
  return out;
}

std::vector<Index> classical_ins(const std::vector<LocalInstrument>& locals) {
  std::vector<Index> out;
  for (const auto& m : locals) out.push_back(m.classical_in());
  return out;
}

std::vector<Index> classical_outs(const std::vector<LocalInstrument>& locals) {
  std::vector<Index> out;
  for (const auto& m : locals) out.push_back(m.classical_out());
  return out;
}

// Prefix sets (y_0..y_k) that can still reach a nonzero column of `next`;
// branches outside them carry zero weight downstream.
std::vector<std::unordered_set<Index>> reachable_prefixes(const RMatrix& next,
                                                          const std::vector<Index>& sizes) {
  std::vector<std::unordered_set<Index>> sets(sizes.size());
  for (Eigen::Index c = 0; c < next.cols(); ++c) {
    if ((next.col(c).array() == 0).all()) continue;
    const auto digits = unflatten(static_cast<Index>(c), sizes);
    Index prefix = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      prefix = prefix * sizes[k] + digits[k];
      sets[k].insert(prefix);
    }
  }
  return sets;
}

const RMatrix& after_round(const LoccProtocol& p, std::size_t r) {
  return r + 1 < p.rounds().size() ? p.rounds()[r + 1].global.matrix() : p.post().matrix();
}

CMatrix zero_square(Index n) {
  return CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

std::string where(std::size_t round, std::size_t party) {
  std::ostringstream os;
  os << "round " << round + 1 << ", party " << party;
  return os.str();
}

}  // namespace

LocalInstrument local_instrument_from_kraus(
    Index party, Index classical_in, Index classical_out, Index quantum_in, Index quantum_out,
    const std::map<HybridProcess::Key, std::vector<CMatrix>>& kraus) {
  HybridProcess::Components c;
  for (const auto& [key, ops] : kraus)
    if (!ops.empty()) c.emplace(key, choi_from_kraus(ops, quantum_in, quantum_out));
  return {party, HybridProcess(SystemType{classical(classical_in), quantum(quantum_in)},
                               SystemType{classical(classical_out), quantum(quantum_out)},
                               std::move(c))};
}

LoccProtocol::LoccProtocol(std::vector<LoccRound> rounds, GlobalClassicalOp post,
                           bool discard_quantum)
    : rounds_(std::move(rounds)), post_(std::move(post)), discard_quantum_(discard_quantum) {
  if (rounds_.empty()) throw InvariantViolation("LoccProtocol: at least one round is required");
  const std::size_t n = rounds_.front().locals.size();
  if (n == 0) throw InvariantViolation("LoccProtocol: at least one party is required");

  std::vector<Index> prev_ys;
  std::vector<Index> prev_dims;
  for (std::size_t r = 0; r < rounds_.size(); ++r) {
    auto& round = rounds_[r];
    if (round.locals.size() != n) {
      std::ostringstream os;
      os << "LoccProtocol: round " << r + 1 << " has " << round.locals.size()
         << " local instruments, expected " << n;
      throw DimensionMismatch(os.str());
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (round.locals[i].party != i)
        throw InvariantViolation("LoccProtocol: " + where(r, i) +
                                 ": local instruments must be listed in party order");
      if (r > 0 && round.locals[i].quantum_in() != prev_dims[i]) {
        std::ostringstream os;
        os << "LoccProtocol: " << where(r, i) << ": quantum input " << round.locals[i].quantum_in()
           << " does not match previous output " << prev_dims[i];
        throw DimensionMismatch(os.str());
      }
    }
    const auto xs = classical_ins(round.locals);
    const RMatrix& g = round.global.matrix();
    if (static_cast<Index>(g.rows()) != product_of(xs)) {
      std::ostringstream os;
      os << "LoccProtocol: round " << r + 1 << ": global operation has " << g.rows()
         << " outputs, local instruments expect " << product_of(xs);
      throw DimensionMismatch(os.str());
    }
    if (r > 0 && static_cast<Index>(g.cols()) != product_of(prev_ys)) {
      std::ostringstream os;
      os << "LoccProtocol: round " << r + 1 << ": global operation has " << g.cols()
         << " inputs, previous round produces " << product_of(prev_ys);
      throw DimensionMismatch(os.str());
    }
    SystemType source = r == 0 ? round.global.source() : SystemType::classical_only(prev_ys);
    round.global = GlobalClassicalOp(std::move(source), SystemType::classical_only(xs), g);
    prev_ys = classical_outs(round.locals);
    prev_dims.clear();
    for (const auto& m : round.locals) prev_dims.push_back(m.quantum_out());
  }
  if (static_cast<Index>(post_.matrix().cols()) != product_of(prev_ys)) {
    std::ostringstream os;
    os << "LoccProtocol: post-processing has " << post_.matrix().cols()
       << " inputs, last round produces " << product_of(prev_ys);
    throw DimensionMismatch(os.str());
  }
  post_ = GlobalClassicalOp(SystemType::classical_only(prev_ys), post_.target(), post_.matrix());
}

std::vector<Index> LoccProtocol::input_dims() const {
  std::vector<Index> out;
  for (const auto& m : rounds_.front().locals) out.push_back(m.quantum_in());
  return out;
}

std::vector<Index> LoccProtocol::output_dims() const {
  std::vector<Index> out;
  for (const auto& m : rounds_.back().locals) out.push_back(m.quantum_out());
  return out;
}

HybridProcess assemble_instrument(const GlobalClassicalOp& pre,
                                  const std::vector<LocalInstrument>& locals,
                                  const GlobalClassicalOp& post) {
  const auto xs = classical_ins(locals);
  const auto ys = classical_outs(locals);
  for (std::size_t i = 0; i < locals.size(); ++i)
    if (locals[i].party != i)
      throw InvariantViolation("assemble_instrument: party " + std::to_string(i) +
                              ": local instruments must be listed in party order");
  if (static_cast<Index>(pre.matrix().rows()) != product_of(xs))
    throw DimensionMismatch("assemble_instrument: pre-operation does not feed the local inputs");
  if (static_cast<Index>(post.matrix().cols()) != product_of(ys))
    throw DimensionMismatch("assemble_instrument: post-operation does not read the local outputs");

  std::vector<Factor> src = pre.source().factors();
  std::vector<Factor> tgt = post.target().factors();
  Index din = 1, dout = 1;
  for (const auto& m : locals) {
    src.push_back(quantum(m.quantum_in()));
    tgt.push_back(quantum(m.quantum_out()));
    din *= m.quantum_in();
    dout *= m.quantum_out();
  }

  const auto by_input = index_locals(locals);
  const auto reach = reachable_prefixes(post.matrix(), ys);
  const RMatrix& pre_m = pre.matrix();
  const RMatrix& post_m = post.matrix();
  std::map<HybridProcess::Key, CMatrix> acc;

  for (Eigen::Index x_in = 0; x_in < pre_m.cols(); ++x_in)
    for (Eigen::Index xr = 0; xr < pre_m.rows(); ++xr) {
      const Real w_pre = pre_m(xr, x_in);
      if (w_pre == 0) continue;
      const auto xd = unflatten(static_cast<Index>(xr), xs);
      std::function<void(std::size_t, Index, const ChoiMatrix&)> descend =
          [&](std::size_t party, Index prefix, const ChoiMatrix& joint) {
            if (party == locals.size()) {
              for (Eigen::Index z = 0; z < post_m.rows(); ++z) {
                const Real w = w_pre * post_m(z, static_cast<Eigen::Index>(prefix));
                if (w == 0) continue;
                HybridProcess::Key key{static_cast<Index>(z), static_cast<Index>(x_in)};
                auto [slot, inserted] = acc.try_emplace(key, w * joint.matrix());
                if (!inserted) slot->second += w * joint.matrix();
              }
              return;
            }
            for (const auto& [y, choi] : by_input[party][xd[party]]) {
              const Index next = prefix * ys[party] + y;
              if (!reach[party].contains(next)) continue;
              descend(party + 1, next, tensor(joint, *choi));
            }
          };
      descend(0, 0, ChoiMatrix::trusted(CMatrix::Ones(1, 1), 1, 1));
    }

  HybridProcess::Components components;
  for (auto& [key, m] : acc)
    components.emplace(key, ChoiMatrix::trusted(std::move(m), din, dout));
  return {SystemType(std::move(src)), SystemType(std::move(tgt)), std::move(components)};
}

HybridProcess to_process(const LoccProtocol& protocol) {
  const auto& rounds = protocol.rounds();
  std::optional<HybridProcess> acc;
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    const bool last = r + 1 == rounds.size();
    const GlobalClassicalOp after =
        last ? protocol.post()
             : GlobalClassicalOp::identity(SystemType::classical_only(classical_outs(rounds[r].locals)));
    HybridProcess step = assemble_instrument(rounds[r].global, rounds[r].locals, after);
    acc = acc ? compose(*acc, step) : std::move(step);
  }
  const auto out_dims = protocol.output_dims();
  if (protocol.discard_quantum() && product_of(out_dims) > 1) {
    const HybridProcess trace = tensor(HybridProcess::identity(protocol.post().target()),
                                       HybridProcess::discard(SystemType::quantum_only(out_dims)));
    acc = compose(*acc, trace);
  }
  return *acc;
}

std::vector<CMatrix> evaluate(const LoccProtocol& protocol, Index x, const CMatrix& rho) {
  std::vector<Index> dims = protocol.input_dims();
  if (static_cast<Index>(rho.rows()) != product_of(dims) || rho.rows() != rho.cols()) {
    std::ostringstream os;
    os << "evaluate: state of dimension " << rho.rows() << " for parties of total dimension "
       << product_of(dims);
    throw DimensionMismatch(os.str());
  }
  if (x >= protocol.classical_input())
    throw DimensionMismatch("evaluate: classical input out of range");

  std::map<Index, CMatrix> branches;
  branches.emplace(x, rho);
  const auto& rounds = protocol.rounds();
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    const auto& round = rounds[r];
    const RMatrix& g = round.global.matrix();
    std::map<Index, CMatrix> routed;
    for (const auto& [y, st] : branches)
      for (Eigen::Index xr = 0; xr < g.rows(); ++xr) {
        const Real w = g(xr, static_cast<Eigen::Index>(y));
        if (w == 0) continue;
        auto [slot, inserted] = routed.try_emplace(static_cast<Index>(xr), w * st);
        if (!inserted) slot->second += w * st;
      }

    const auto xs = classical_ins(round.locals);
    const auto ys = classical_outs(round.locals);
    const auto reach = reachable_prefixes(after_round(protocol, r), ys);
    const auto by_input = index_locals(round.locals);
    std::map<Index, CMatrix> after;
    for (const auto& [xr, st] : routed) {
      const auto xd = unflatten(xr, xs);
      std::function<void(std::size_t, Index, const CMatrix&, std::vector<Index>)> descend =
          [&](std::size_t party, Index prefix, const CMatrix& cur, std::vector<Index> cur_dims) {
            if (party == round.locals.size()) {
              auto [slot, inserted] = after.try_emplace(prefix, cur);
              if (!inserted) slot->second += cur;
              return;
            }
            for (const auto& [y, choi] : by_input[party][xd[party]]) {
              const Index next = prefix * ys[party] + y;
              if (!reach[party].contains(next)) continue;
              CMatrix out = apply_choi_on_factor(*choi, cur, cur_dims, party);
              if (out.isZero(0)) continue;
              auto next_dims = cur_dims;
              next_dims[party] = choi->output_dim();
              descend(party + 1, next, out, std::move(next_dims));
            }
          };
      descend(0, 0, st, dims);
    }
    branches = std::move(after);
    dims.clear();
    for (const auto& m : round.locals) dims.push_back(m.quantum_out());
  }

  const RMatrix& post = protocol.post().matrix();
  std::vector<CMatrix> out(static_cast<std::size_t>(post.rows()), zero_square(product_of(dims)));
  for (const auto& [y, st] : branches)
    for (Eigen::Index z = 0; z < post.rows(); ++z) {
      const Real w = post(z, static_cast<Eigen::Index>(y));
      if (w != 0) out[static_cast<std::size_t>(z)] += w * st;
    }
  return out;
}

RVector apply_protocol(const LoccProtocol& protocol, const PureState& psi) {
  if (psi.partition().dims() != protocol.input_dims())
    throw DimensionMismatch("apply_protocol: state partition does not match the protocol's parties");
  if (protocol.classical_input() != 1)
    throw PreconditionFailed(
        "apply_protocol: protocol expects a classical input (preparation direction)");
  const auto outs = evaluate(protocol, 0, psi.density());
  RVector weights(static_cast<Eigen::Index>(outs.size()));
  for (std::size_t z = 0; z < outs.size(); ++z)
    weights(static_cast<Eigen::Index>(z)) = outs[z].trace().real();
  return weights;
}

std::vector<std::string> VerificationReport::failing_labels(Real tol) const {
  std::vector<std::string> out;
  for (const auto& l : labels)
    if (!(l.deviation <= tol)) out.push_back(l.label);
  return out;
}

VerificationReport verify_distinguishing(const LoccProtocol& protocol,
                                         const OrthonormalFamily& family, Real tol) {
  VerificationReport report;
  if (protocol.classical_input() != 1)
    report.shape_error = "protocol takes a classical input; it is not a distinguisher";
  else if (protocol.input_dims() != family.partition.dims())
    report.shape_error = "protocol parties do not match the family partition";
  else if (protocol.classical_output() != family.size())
    report.shape_error = "protocol output does not range over the family labels";
  if (!report.shape_error.empty()) return report;

  for (Index b = 0; b < family.size(); ++b) {
    RVector expected = RVector::Zero(static_cast<Eigen::Index>(family.size()));
    expected(static_cast<Eigen::Index>(b)) = 1;
    const RVector got = apply_protocol(protocol, family.states[b]);
    const Real dev = max_abs_diff(got, expected);
    report.labels.push_back({family.labels[b], dev, 0});
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  report.pass = report.max_deviation <= tol;
  return report;
}

LoccProtocol reverse_protocol(const LoccProtocol& protocol) {
  std::vector<LoccRound> rounds = protocol.rounds();
  if (protocol.discard_quantum())
    for (auto& m : rounds.back().locals) {
      if (m.quantum_out() == 1) continue;
      const HybridProcess trace =
          tensor(HybridProcess::identity(SystemType{classical(m.classical_out())}),
                 HybridProcess::discard(SystemType{quantum(m.quantum_out())}));
      m.process = compose(m.process, trace);
    }

  const std::size_t n_rounds = rounds.size();
  std::vector<LoccRound> reversed;
  reversed.reserve(n_rounds);
  for (std::size_t k = 0; k < n_rounds; ++k) {
    const std::size_t r = n_rounds - 1 - k;
    LoccRound round{dagger(r + 1 < n_rounds ? rounds[r + 1].global : protocol.post()), {}};
    for (const auto& m : rounds[r].locals) round.locals.push_back({m.party, dagger(m.process)});
    reversed.push_back(std::move(round));
  }
  return LoccProtocol(std::move(reversed), dagger(rounds.front().global), false);
}

VerificationReport verify_preparation(const LoccProtocol& protocol,
                                      const OrthonormalFamily& family, Real tol) {
  VerificationReport report;
  const auto in_dims = protocol.input_dims();
  if (protocol.classical_input() != family.size())
    report.shape_error = "protocol input does not range over the family labels";
  else if (product_of(in_dims) != 1)
    report.shape_error = "protocol has a quantum input; it is not a preparation";
  else if (protocol.output_dims() != family.partition.dims())
    report.shape_error = "protocol outputs do not match the family partition";
  if (!report.shape_error.empty()) return report;

  for (Index b = 0; b < family.size(); ++b) {
    const auto outs = evaluate(protocol, b, CMatrix::Ones(1, 1));
    CMatrix prepared = zero_square(family.partition.total_dim());
    for (const auto& o : outs) prepared += o;
    const CMatrix diff = prepared - family.states[b].density();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig((diff + diff.adjoint()) / 2.0,
                                               Eigen::EigenvaluesOnly);
    const Real trace_distance = 0.5 * eig.eigenvalues().cwiseAbs().sum();
    const Real dev = max_abs(diff);
    report.labels.push_back({family.labels[b], dev, trace_distance});
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  report.pass = report.max_deviation <= tol;
  return report;
}

Real ProductMixture::total_weight() const {
  Real w = 0;
  for (const auto& t : terms) w += t.weight;
  return w;
}

CMatrix ProductMixture::density() const {
  const auto total = static_cast<Eigen::Index>(product_of(dims));
  CMatrix rho = CMatrix::Zero(total, total);
  for (const auto& t : terms) {
    const CVector v = tensor_all(t.locals);
    rho += t.weight * v * v.adjoint();
  }
  return rho;
}

Real ProductMixture::fidelity(const CVector& psi) const {
  const Real total = total_weight();
  if (total <= 0) return 0;
  Real overlap = 0;
  for (const auto& t : terms) overlap += t.weight * std::norm(tensor_all(t.locals).dot(psi));
  return overlap / (total * psi.squaredNorm());
}

ProductMixture expand_as_product_mixture(const LoccProtocol& protocol, Index label) {
  const auto in_dims = protocol.input_dims();
  if (product_of(in_dims) != 1)
    throw PreconditionFailed(
        "expand_as_product_mixture: protocol has a quantum input; expected the preparation direction");
  if (label >= protocol.classical_input())
    throw PreconditionFailed("expand_as_product_mixture: label outside the protocol's classical input");

  struct Path {
    Index classical;
    Real weight;
    std::vector<CMatrix> locals;
  };
  const std::size_t n = protocol.parties();
  std::vector<Path> frontier{{label, 1.0, std::vector<CMatrix>(n, CMatrix::Ones(1, 1))}};

  const auto& rounds = protocol.rounds();
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    const auto& round = rounds[r];
    const RMatrix& g = round.global.matrix();
    const auto xs = classical_ins(round.locals);
    const auto ys = classical_outs(round.locals);
    const auto reach = reachable_prefixes(after_round(protocol, r), ys);
    const auto by_input = index_locals(round.locals);
    std::vector<Path> next_frontier;
    for (const auto& path : frontier)
      for (Eigen::Index xr = 0; xr < g.rows(); ++xr) {
        const Real w = g(xr, static_cast<Eigen::Index>(path.classical));
        if (w == 0) continue;
        const auto xd = unflatten(static_cast<Index>(xr), xs);
        std::function<void(std::size_t, Index, std::vector<CMatrix>&)> descend =
            [&](std::size_t party, Index prefix, std::vector<CMatrix>& locals) {
              if (party == n) {
                next_frontier.push_back({prefix, path.weight * w, locals});
                return;
              }
              for (const auto& [y, choi] : by_input[party][xd[party]]) {
                const Index next = prefix * ys[party] + y;
                if (!reach[party].contains(next)) continue;
                CMatrix out = apply_choi(*choi, locals[party]);
                if (out.isZero(0)) continue;
                CMatrix saved = std::move(locals[party]);
                locals[party] = std::move(out);
                descend(party + 1, next, locals);
                locals[party] = std::move(saved);
              }
            };
        auto locals = path.locals;
        descend(0, 0, locals);
      }
    frontier = std::move(next_frontier);
  }

  ProductMixture mixture;
  mixture.dims = protocol.output_dims();
  const RMatrix& post = protocol.post().matrix();
  for (const auto& path : frontier) {
    const Real w = path.weight * post.col(static_cast<Eigen::Index>(path.classical)).sum();
    if (w == 0) continue;
    // Pure decomposition of every local output.
    std::vector<std::vector<std::pair<Real, CVector>>> spectra(n);
    bool vanishes = false;
    for (std::size_t i = 0; i < n; ++i) {
      const CMatrix h = (path.locals[i] + path.locals[i].adjoint()) / 2.0;
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
      const Real top = eig.eigenvalues().maxCoeff();
      if (top <= 0) {
        vanishes = true;
        break;
      }
      for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k)
        if (eig.eigenvalues()(k) > 1e-13 * top)
          spectra[i].emplace_back(eig.eigenvalues()(k), eig.eigenvectors().col(k));
    }
    if (vanishes) continue;
    std::vector<std::size_t> pick(n, 0);
    while (true) {
      ProductMixture::Term term{w, {}};
      for (std::size_t i = 0; i < n; ++i) {
        term.weight *= spectra[i][pick[i]].first;
        term.locals.push_back(spectra[i][pick[i]].second);
      }
      mixture.terms.push_back(std::move(term));
      std::size_t i = n;
      while (i-- > 0) {
        if (++pick[i] < spectra[i].size()) break;
        pick[i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }
  return mixture;
}

LoccProtocol build_product_preparation(const OrthonormalFamily& family, Real tol) {
  const FamilyReport report = check_family(family, tol);
  if (!report.valid())
    throw PreconditionFailed("build_product_preparation: not a complete orthonormal family");
  const Index n_labels = family.size();
  const auto& dims = family.partition.dims();
  const std::size_t n = dims.size();

  std::vector<std::vector<CVector>> factors;
  for (Index b = 0; b < n_labels; ++b) {
    auto f = product_factorize(family.states[b], tol);
    if (!f)
      throw PreconditionFailed("build_product_preparation: member '" + family.labels[b] +
                               "' is entangled");
    for (auto& v : f->factors) v /= v.norm();
    factors.push_back(std::move(f->factors));
  }

  const std::vector<Index> copies(n, n_labels);
  RMatrix copy = RMatrix::Zero(static_cast<Eigen::Index>(product_of(copies)),
                               static_cast<Eigen::Index>(n_labels));
  for (Index b = 0; b < n_labels; ++b) {
    const std::vector<Index> same(n, b);
    copy(static_cast<Eigen::Index>(flatten(same, copies)), static_cast<Eigen::Index>(b)) = 1;
  }

  LoccRound round{GlobalClassicalOp(SystemType{classical(n_labels)},
                                    SystemType::classical_only(copies), std::move(copy)),
                  {}};
  for (std::size_t i = 0; i < n; ++i) {
    HybridProcess::Components c;
    for (Index b = 0; b < n_labels; ++b) {
      const CVector& v = factors[b][i];
      c.emplace(HybridProcess::Key{0, b}, ChoiMatrix::trusted(v * v.adjoint(), 1, dims[i]));
    }
    round.locals.push_back(
        {i, HybridProcess(SystemType{classical(n_labels)}, SystemType{quantum(dims[i])},
                          std::move(c))});
  }
  GlobalClassicalOp post(SystemType{}, SystemType{}, RMatrix::Ones(1, 1));
  return LoccProtocol({std::move(round)}, std::move(post), false);
}

LoccProtocol build_product_distinguisher(const OrthonormalFamily& family, Real tol) {
  return reverse_protocol(build_product_preparation(family, tol));
}

TheoremVerdict theorem_check(const LoccProtocol& protocol, const OrthonormalFamily& family,
                             Real tol) {
  TheoremVerdict out;
  out.family = check_family(family, tol);
  out.verification = verify_distinguishing(protocol, family, tol);
  if (!out.verification.pass) {
    out.verdict = Verdict::Inconclusive;
    out.failing_labels = out.verification.failing_labels(tol);
    return out;
  }
  const auto entangled = out.family.entangled_labels();
  if (entangled.empty()) {
    out.verdict = Verdict::ConsistentDistinguishes;
    return out;
  }
  out.verdict = Verdict::Contradiction;
  out.evidence_label = entangled.front();
  out.evidence = expand_as_product_mixture(reverse_protocol(protocol),
                                           family.index_of(out.evidence_label));
  return out;
}

Real success_probability(const LoccProtocol& protocol, const OrthonormalFamily& family,
                         const RVector& prior) {
  if (!is_normalised(to_process(protocol), kDefaultTolerance))
    throw PreconditionFailed("success_probability: protocol is not normalised");
  if (static_cast<Index>(prior.size()) != family.size() || (prior.array() < 0).any() ||
      std::abs(prior.sum() - 1) > kDefaultTolerance)
    throw PreconditionFailed("success_probability: prior is not a distribution over the labels");
  if (protocol.classical_output() != family.size())
    throw PreconditionFailed("success_probability: protocol output does not range over the labels");
  Real p = 0;
  for (Index b = 0; b < family.size(); ++b) {
    const auto k = static_cast<Eigen::Index>(b);
    if (prior(k) == 0) continue;
    p += prior(k) * apply_protocol(protocol, family.states[b])(k);
  }
  return p;
}

bool protocols_equal(const LoccProtocol& a, const LoccProtocol& b, Real tol) {
  if (a.rounds().size() != b.rounds().size() || a.parties() != b.parties()) return false;
  const auto same_matrix = [tol](const RMatrix& x, const RMatrix& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && max_abs_diff(x, y) <= tol;
  };
  for (std::size_t r = 0; r < a.rounds().size(); ++r) {
    const auto& ra = a.rounds()[r];
    const auto& rb = b.rounds()[r];
    if (!same_matrix(ra.global.matrix(), rb.global.matrix())) return false;
    for (std::size_t i = 0; i < ra.locals.size(); ++i) {
      const auto& pa = ra.locals[i].process;
      const auto& pb = rb.locals[i].process;
      if (!(pa.source() == pb.source()) || !(pa.target() == pb.target())) return false;
      if (max_norm_distance(pa, pb) > tol) return false;
    }
  }
  if (!same_matrix(a.post().matrix(), b.post().matrix())) return false;
  return product_of(a.output_dims()) == 1 || a.discard_quantum() == b.discard_quantum();
}

}  // namespace cpt
