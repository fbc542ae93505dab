#include "cpt/commands.hpp"

#include "cpt/corpus.hpp"
#include "cpt/errors.hpp"
#include "cpt/theory.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

namespace cpt {

using nlohmann::json;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string format_real(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

const LoccProtocol& require(const Scenario& s, const std::string& name) {
  if (const auto* p = s.find(name)) return *p;
  std::string known;
  for (const auto& np : s.protocols) known += (known.empty() ? "" : ", ") + np.name;
  throw UsageError("scenario '" + s.id + "' has no protocol '" + name + "' (known: " + known + ")");
}

bool is_preparation(const LoccProtocol& p, const OrthonormalFamily& family) {
  return p.classical_input() == family.size() && p.classical_output() == 1 &&
         !p.discard_quantum() && p.classical_input() != 1;
}

void fill_deviations(Report& r, const VerificationReport& v) {
  for (const auto& l : v.labels) r.deviations.emplace_back(l.label, l.deviation);
}

json verification_json(const VerificationReport& v, Real tol) {
  json j{{"pass", v.pass}, {"max_deviation", v.max_deviation}, {"failing_labels", v.failing_labels(tol)}};
  if (!v.shape_error.empty()) j["shape_error"] = v.shape_error;
  return j;
}

json family_json(const FamilyReport& f) {
  json members = json::array();
  for (const auto& m : f.members) {
    json e{{"label", m.label}, {"product", m.product}, {"max_schmidt_rank", m.max_schmidt_rank}};
    if (!m.product) e["entangled_cut"] = m.entangled_cut;
    members.push_back(e);
  }
  const auto entangled = f.entangled_labels();
  return {{"complete", f.complete},
          {"expected_size", f.expected_size},
          {"actual_size", f.actual_size},
          {"orthonormal", f.orthonormal},
          {"gram_deviation", f.gram_deviation},
          {"partitions_consistent", f.partitions_consistent},
          {"entangled_members", entangled.size()},
          {"summary", std::to_string(entangled.size()) + " entangled member" +
                          (entangled.size() == 1 ? "" : "s")},
          {"members", members}};
}

json flags_json(const LoccProtocol& p, Real tol) {
  const HybridProcess f = to_process(p);
  return {{"normalised", is_normalised(f, tol)}, {"unital", is_unital(f, tol)}};
}

Report start(const char* command, const Scenario& s, std::string protocol, Real tol) {
  Report r;
  r.command = command;
  r.scenario_id = s.id;
  r.protocol = std::move(protocol);
  r.tolerance = tol;
  return r;
}

Verdict overall(const std::vector<Verdict>& verdicts) {
  return std::ranges::find(verdicts, Verdict::Contradiction) != verdicts.end()
             ? Verdict::Contradiction
             : Verdict::Inconclusive;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::ConsistentDistinguishes: return "CONSISTENT_DISTINGUISHES";
    case Verdict::Contradiction: return "CONTRADICTION";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

struct CandidateResult {
  Verdict verdict = Verdict::Inconclusive;
  VerificationReport verification;
  bool normalised = false;
  std::optional<Real> success;
};

CandidateResult examine(const Candidate& c, const OrthonormalFamily& family, Real tol) {
  CandidateResult out;
  const TheoremVerdict tv = theorem_check(c.protocol, family, tol);
  out.verdict = tv.verdict;
  out.verification = tv.verification;
  out.normalised = is_normalised(to_process(c.protocol), kDefaultTolerance);
  if (out.normalised) {
    const RVector prior = RVector::Constant(static_cast<Eigen::Index>(family.size()),
                                            1.0 / static_cast<Real>(family.size()));
    out.success = success_probability(c.protocol, family, prior);
  }
  return out;
}

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f) {
  std::vector<T> out(n);
  const std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < std::min(workers, n); ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) out[i] = f(i);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

}  // namespace

std::string to_string(ReportVerdict verdict) {
  switch (verdict) {
    case ReportVerdict::Pass: return "PASS";
    case ReportVerdict::Fail: return "FAIL";
    case ReportVerdict::ConsistentDistinguishes: return "CONSISTENT_DISTINGUISHES";
    case ReportVerdict::Contradiction: return "CONTRADICTION";
    case ReportVerdict::Inconclusive: return "INCONCLUSIVE";
    case ReportVerdict::NotApplicable: return "NOT_APPLICABLE";
    case ReportVerdict::ContradictionHypothesis: return "CONTRADICTION_HYPOTHESIS";
  }
  return "FAIL";
}

json Report::to_json() const {
  json devs = json::array();
  for (const auto& [label, d] : deviations) devs.push_back({{"label", label}, {"deviation", d}});
  return {{"command", command},     {"scenario", scenario_id},    {"protocol", protocol},
          {"verdict", cpt::to_string(verdict)}, {"tolerance", tolerance}, {"deviations", devs},
          {"details", details},     {"exit_code", exit_code},     {"wall_time_s", wall_time_s}};
}

std::string Report::to_text() const {
  std::ostringstream os;
  os << "command:   " << command << '\n' << "scenario:  " << scenario_id << '\n';
  if (!protocol.empty()) os << "protocol:  " << protocol << '\n';
  os << "verdict:   " << cpt::to_string(verdict) << '\n'
     << "tolerance: " << format_real(tolerance) << '\n';
  for (const auto& [label, d] : deviations) os << "  " << label << "  deviation " << format_real(d) << '\n';
  for (const auto& [key, value] : details.items()) {
    if (value.is_array() && !value.empty() && value.front().is_object()) {
      os << key << ":\n";
      for (const auto& item : value) os << "  " << item.dump() << '\n';
    } else {
      os << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    }
  }
  os << "wall time: " << wall_time_s << " s\n";
  return os.str();
}

Report cmd_verify(const Scenario& scenario, const std::string& name, Real tol) {
  Stopwatch clock;
  const LoccProtocol& p = require(scenario, name);
  Report r = start("verify", scenario, name, tol);
  const bool prep = is_preparation(p, scenario.family);
  const VerificationReport v = prep ? verify_preparation(p, scenario.family, tol)
                                    : verify_distinguishing(p, scenario.family, tol);
  fill_deviations(r, v);
  r.verdict = v.pass ? ReportVerdict::Pass : ReportVerdict::Fail;
  r.details["direction"] = prep ? "preparation" : "distinguishing";
  r.details["verification"] = verification_json(v, tol);
  if (prep) {
    json traces = json::array();
    for (const auto& l : v.labels) traces.push_back({{"label", l.label}, {"trace_distance", l.trace_distance}});
    r.details["trace_distances"] = traces;
  }
  r.exit_code = v.pass ? 0 : 1;
  r.wall_time_s = clock.seconds();
  return r;
}

Report cmd_reverse(const Scenario& scenario, const std::string& name,
                   const std::filesystem::path& out, Real tol) {
  Stopwatch clock;
  const LoccProtocol& p = require(scenario, name);
  Report r = start("reverse", scenario, name, tol);
  const LoccProtocol reversed = reverse_protocol(p);

  r.details["original"] = flags_json(p, tol);
  r.details["reversed"] = flags_json(reversed, tol);
  const bool prep = is_preparation(reversed, scenario.family);
  const VerificationReport v = prep ? verify_preparation(reversed, scenario.family, tol)
                                    : verify_distinguishing(reversed, scenario.family, tol);
  r.details["reversed_direction"] = prep ? "preparation" : "distinguishing";
  r.details["reversed_verification"] = verification_json(v, tol);

  Scenario written{scenario.id, scenario.family, {{name, reversed}}, scenario.metadata};
  written.metadata["reversed_from"] = name;
  save_scenario(written, out);
  r.details["output"] = out.string();
  r.verdict = ReportVerdict::Pass;
  r.exit_code = 0;
  r.wall_time_s = clock.seconds();
  return r;
}

Report cmd_refute(const Scenario& scenario, Index suite, std::uint64_t seed, Real tol) {
  Stopwatch clock;
  Report r = start("refute", scenario, "", tol);
  const FamilyReport fam = check_family(scenario.family, tol);
  r.details["family"] = family_json(fam);
  r.details["suite"] = suite;
  r.details["seed"] = seed;
  if (fam.all_product()) {
    r.verdict = ReportVerdict::NotApplicable;
    r.exit_code = 0;
    r.wall_time_s = clock.seconds();
    return r;
  }

  std::vector<Candidate> fixed = handcrafted_candidates(scenario.family);
  for (const auto& np : scenario.protocols)
    if (np.protocol.classical_input() == 1 && np.protocol.classical_output() == scenario.family.size())
      fixed.push_back({np.name, "scenario", np.protocol, false});

  const std::size_t total = fixed.size() + suite;
  const auto candidates = parallel_map<std::optional<Candidate>>(total, [&](std::size_t i) {
    if (i < fixed.size()) return std::optional<Candidate>(fixed[i]);
    const Index k = i - fixed.size();
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k)};
    std::mt19937_64 rng(seq);
    return std::optional<Candidate>(random_candidate(scenario.family, rng, "random_" + std::to_string(k)));
  });
  const auto results = parallel_map<CandidateResult>(
      total, [&](std::size_t i) { return examine(*candidates[i], scenario.family, tol); });

  std::vector<Real> best(scenario.family.size(), std::numeric_limits<Real>::infinity());
  std::vector<Verdict> verdicts;
  json rows = json::array();
  Real max_success = 0, max_projective = 0;
  Index passes = 0;
  std::string best_name;
  for (std::size_t i = 0; i < total; ++i) {
    const Candidate& c = *candidates[i];
    const CandidateResult& res = results[i];
    verdicts.push_back(res.verdict);
    if (res.verification.pass) ++passes;
    for (std::size_t b = 0; b < res.verification.labels.size(); ++b)
      best[b] = std::min(best[b], res.verification.labels[b].deviation);
    json row{{"name", c.name},
             {"origin", c.origin},
             {"verdict", verdict_name(res.verdict)},
             {"verification", res.verification.pass ? "PASS" : "FAIL"},
             {"max_deviation", res.verification.max_deviation},
             {"normalised", res.normalised}};
    if (res.success) {
      row["success_probability"] = *res.success;
      if (best_name.empty() || *res.success > max_success) {
        max_success = *res.success;
        best_name = c.name;
      }
      if (c.one_round_projective) max_projective = std::max(max_projective, *res.success);
    }
    rows.push_back(row);
  }
  for (std::size_t b = 0; b < best.size(); ++b)
    r.deviations.emplace_back(scenario.family.labels[b], best[b]);

  r.details["candidates_tested"] = total;
  r.details["pass_count"] = passes;
  r.details["max_success_probability"] = max_success;
  r.details["best_candidate"] = best_name;
  r.details["max_success_one_round_projective"] = max_projective;
  r.details["candidates"] = rows;

  const bool reached_one = max_success >= 1 - tol;
  r.details["reached_perfect_success"] = reached_one;
  r.verdict = overall(verdicts) == Verdict::Contradiction || reached_one ? ReportVerdict::Contradiction
                                                                         : ReportVerdict::Inconclusive;
  r.exit_code = r.verdict == ReportVerdict::Contradiction ? 1 : 0;
  r.wall_time_s = clock.seconds();
  return r;
}

Report cmd_distinguish(const Scenario& scenario, Real tol,
                       const std::optional<std::filesystem::path>& out) {
  Stopwatch clock;
  Report r = start("distinguish", scenario, "product_distinguisher", tol);
  const FamilyReport fam = check_family(scenario.family, tol);
  r.details["family"] = family_json(fam);

  if (!fam.valid()) {
    r.verdict = ReportVerdict::Fail;
    r.exit_code = 1;
    r.details["reason"] = "family is not a complete orthonormal basis";
    r.wall_time_s = clock.seconds();
    return r;
  }

  if (!fam.all_product()) {
    const std::string label = fam.entangled_labels().front();
    const Index b = scenario.family.index_of(label);
    const FamilyMember& m = fam.members[b];
    std::vector<Index> cut(m.entangled_cut);
    for (Index k = 0; k < m.entangled_cut; ++k) cut[k] = k;
    const RVector coeffs = schmidt_coefficients(scenario.family.states[b], cut);
    json evidence{{"label", label},
                  {"cut", cut},
                  {"schmidt_rank", schmidt_rank(scenario.family.states[b], cut)},
                  {"schmidt_coefficients", std::vector<Real>(coeffs.data(), coeffs.data() + coeffs.size())}};
    r.details["evidence"] = evidence;
    r.details["reason"] = "an orthonormal basis with an entangled member has no perfect LOCC distinguisher";
    r.verdict = ReportVerdict::ContradictionHypothesis;
    r.exit_code = 1;
    r.wall_time_s = clock.seconds();
    return r;
  }

  const LoccProtocol prep = build_product_preparation(scenario.family, tol);
  const LoccProtocol dist = reverse_protocol(prep);
  const VerificationReport v = verify_distinguishing(dist, scenario.family, tol);
  fill_deviations(r, v);
  r.details["verification"] = verification_json(v, tol);
  r.details["distinguisher"] = flags_json(dist, tol);
  r.details["preparation"] = flags_json(prep, tol);
  if (out) {
    Scenario written{scenario.id, scenario.family,
                     {{"product_preparation", prep}, {"product_distinguisher", dist}},
                     scenario.metadata};
    save_scenario(written, *out);
    r.details["output"] = out->string();
  }
  r.verdict = v.pass ? ReportVerdict::Pass : ReportVerdict::Fail;
  r.exit_code = v.pass ? 0 : 1;
  r.wall_time_s = clock.seconds();
  return r;
}

Report cmd_check_family(const Scenario& scenario, Real tol) {
  Stopwatch clock;
  Report r = start("check-family", scenario, "", tol);
  const FamilyReport fam = check_family(scenario.family, tol);
  r.details["family"] = family_json(fam);
  if (!fam.valid()) r.details["summary"] = "not a complete orthonormal basis";
  r.verdict = fam.valid() ? ReportVerdict::Pass : ReportVerdict::Fail;
  r.exit_code = fam.valid() ? 0 : 1;
  r.wall_time_s = clock.seconds();
  return r;
}

}  // namespace cpt
