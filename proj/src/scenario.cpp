#include "cpt/scenario.hpp"

#include "cpt/errors.hpp"

#include <fstream>
#include <sstream>

namespace cpt {

using nlohmann::json;

namespace {

// A JSON node together with its path, so errors can name the field.
class Field {
 public:
  Field(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw ScenarioError("field " + (path_.empty() ? std::string("/") : path_) + ": " + message);
  }

  Field operator[](const char* key) const {
    if (!node_.is_object()) fail("expected an object");
    auto it = node_.find(key);
    if (it == node_.end()) fail(std::string("missing key '") + key + "'");
    return {*it, path_ + "/" + key};
  }

  Field operator[](std::size_t index) const {
    if (!node_.is_array() || index >= node_.size()) fail("index out of range");
    return {node_[index], path_ + "/" + std::to_string(index)};
  }

  bool has(const char* key) const { return node_.is_object() && node_.contains(key); }

  std::size_t size() const {
    if (!node_.is_array()) fail("expected an array");
    return node_.size();
  }

  Real real() const {
    if (!node_.is_number()) fail("expected a number");
    return node_.get<Real>();
  }

  Index index() const {
    if (!node_.is_number_integer() || node_.get<long long>() < 0)
      fail("expected a non-negative integer");
    return node_.get<Index>();
  }

  bool boolean() const {
    if (!node_.is_boolean()) fail("expected true or false");
    return node_.get<bool>();
  }

  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }

  Complex complex() const {
    if (node_.is_number()) return {node_.get<Real>(), 0.0};
    if (!node_.is_array() || node_.size() != 2 || !node_[0].is_number() || !node_[1].is_number())
      fail("expected a complex number [re, im]");
    return {node_[0].get<Real>(), node_[1].get<Real>()};
  }

  const json& raw() const { return node_; }
  const std::string& path() const { return path_; }

 private:
  const json& node_;
  std::string path_;
};

CMatrix read_complex_matrix(const Field& f) {
  const Index rows = f["rows"].index(), cols = f["cols"].index();
  const Field data = f["data"];
  if (data.size() != rows * cols) data.fail("expected rows*cols entries");
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r * cols + c].complex();
  return m;
}

RMatrix read_real_matrix(const Field& f) {
  const Index rows = f["rows"].index(), cols = f["cols"].index();
  const Field data = f["data"];
  if (data.size() != rows * cols) data.fail("expected rows*cols entries");
  RMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      const Real v = data[r * cols + c].real();
      if (v < 0) data[r * cols + c].fail("global classical operations must be non-negative");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  return m;
}

json write_complex(const Complex& z) { return json::array({z.real(), z.imag()}); }

json write_complex_matrix(const CMatrix& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(write_complex(m(r, c)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

json write_real_matrix(const RMatrix& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

LocalInstrument read_local(const Field& f) {
  const Index party = f["party"].index();
  const Index cin = f["classical_in"].index(), cout = f["classical_out"].index();
  const Index qin = f["quantum_in"].index(), qout = f["quantum_out"].index();
  if (cin < 1 || cout < 1 || qin < 1 || qout < 1) f.fail("wire sizes must be >= 1");
  HybridProcess::Components components;
  const Field comps = f["components"];
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const Field c = comps[k];
    const Index y = c["y"].index(), x = c["x"].index();
    if (y >= cout || x >= cin) c.fail("classical index out of range");
    if (components.contains({y, x})) c.fail("duplicate component");
    try {
      if (c.has("choi")) {
        components.emplace(HybridProcess::Key{y, x},
                           ChoiMatrix(read_complex_matrix(c["choi"]), qin, qout));
      } else {
        const Field ops = c["kraus"];
        std::vector<CMatrix> kraus;
        for (std::size_t j = 0; j < ops.size(); ++j) kraus.push_back(read_complex_matrix(ops[j]));
        if (!kraus.empty())
          components.emplace(HybridProcess::Key{y, x}, choi_from_kraus(kraus, qin, qout));
      }
    } catch (const std::invalid_argument& e) {
      c.fail(e.what());
    }
  }
  return {party, HybridProcess(SystemType{classical(cin), quantum(qin)},
                               SystemType{classical(cout), quantum(qout)}, std::move(components))};
}

LoccProtocol read_protocol(const Field& f) {
  std::vector<LoccRound> rounds;
  const Field rs = f["rounds"];
  for (std::size_t r = 0; r < rs.size(); ++r) {
    const Field round = rs[r];
    const RMatrix g = read_real_matrix(round["global"]);
    std::vector<LocalInstrument> locals;
    const Field ls = round["locals"];
    for (std::size_t i = 0; i < ls.size(); ++i) locals.push_back(read_local(ls[i]));
    const auto cols = static_cast<Index>(g.cols());
    // The first global operation reads the protocol's classical input.
    GlobalClassicalOp op(SystemType{classical(cols)},
                         SystemType{classical(static_cast<Index>(g.rows()))}, g);
    rounds.push_back({std::move(op), std::move(locals)});
  }
  const RMatrix post = read_real_matrix(f["post"]);
  const bool discard = f.has("discard_quantum") ? f["discard_quantum"].boolean() : true;
  try {
    return LoccProtocol(std::move(rounds),
                        GlobalClassicalOp(SystemType{classical(static_cast<Index>(post.cols()))},
                                          SystemType{classical(static_cast<Index>(post.rows()))},
                                          post),
                        discard);
  } catch (const std::invalid_argument& e) {
    f.fail(e.what());
  }
}

// Human-oriented line/column for a 1-based byte position.
std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void validate(const Scenario& s, Real tol) {
  const FamilyReport report = check_family(s.family, tol);
  if (!report.partitions_consistent) throw ScenarioError("family: member partition mismatch");
  if (!report.complete) {
    std::ostringstream os;
    os << "family: completeness violated, |B| = " << report.actual_size
       << " but the joint dimension is " << report.expected_size;
    throw ScenarioError(os.str());
  }
  if (!report.orthonormal) {
    const auto n = static_cast<Eigen::Index>(s.family.size());
    Real worst = -1;
    std::string a, b;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const Complex g = s.family.states[static_cast<Index>(i)].amplitudes().dot(
            s.family.states[static_cast<Index>(j)].amplitudes());
        const Real dev = std::abs(g - Complex(i == j ? 1.0 : 0.0));
        if (dev > worst) {
          worst = dev;
          a = s.family.labels[static_cast<Index>(i)];
          b = s.family.labels[static_cast<Index>(j)];
        }
      }
    std::ostringstream os;
    os << "family: orthonormality violated at labels '" << a << "', '" << b
       << "' (Gram deviation " << worst << ")";
    throw ScenarioError(os.str());
  }
  for (const auto& np : s.protocols) {
    const auto& dims = s.partition().dims();
    if (np.protocol.input_dims() != dims && np.protocol.output_dims() != dims)
      throw ScenarioError("protocol '" + np.name + "': parties do not match the partition");
  }
}

}  // namespace

const LoccProtocol* Scenario::find(const std::string& name) const {
  for (const auto& np : protocols)
    if (np.name == name) return &np.protocol;
  return nullptr;
}

Scenario parse_scenario(const json& doc, Validation validation, Real tol) {
  const Field root(doc, "");
  const Index version = root["format_version"].index();
  if (version != kScenarioFormatVersion)
    root["format_version"].fail("unsupported format version " + std::to_string(version));

  std::vector<Index> dims;
  const Field part = root["partition"];
  for (std::size_t k = 0; k < part.size(); ++k) dims.push_back(part[k].index());
  PartyPartition partition = [&] {
    try {
      return PartyPartition(dims);
    } catch (const std::invalid_argument& e) {
      part.fail(e.what());
    }
  }();

  Scenario s{root.has("id") ? root["id"].string() : std::string{},
             OrthonormalFamily{partition, {}, {}},
             {},
             {}};
  if (root.has("metadata")) {
    const Field meta = root["metadata"];
    if (!meta.raw().is_object()) meta.fail("expected an object");
    for (const auto& [key, value] : meta.raw().items())
      s.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
  }

  const Field fam = root["family"];
  for (std::size_t k = 0; k < fam.size(); ++k) {
    const Field member = fam[k];
    const Field amps = member["amplitudes"];
    CVector v(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t j = 0; j < amps.size(); ++j) v(static_cast<Eigen::Index>(j)) = amps[j].complex();
    try {
      s.family.states.emplace_back(std::move(v), partition);
    } catch (const std::invalid_argument& e) {
      member.fail(e.what());
    }
    s.family.labels.push_back(member["label"].string());
  }

  if (root.has("protocols")) {
    const Field ps = root["protocols"];
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const std::string name = ps[k]["name"].string();
      if (s.find(name)) ps[k]["name"].fail("duplicate protocol name '" + name + "'");
      s.protocols.push_back({name, read_protocol(ps[k])});
    }
  }

  if (validation == Validation::Strict) validate(s, tol);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, Validation validation, Real tol) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(path.string() + ": parse error at " + locate(text, e.byte) + ": " +
                        e.what());
  }
  try {
    return parse_scenario(doc, validation, tol);
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

json to_json(const LoccProtocol& protocol) {
  json rounds = json::array();
  for (const auto& round : protocol.rounds()) {
    json locals = json::array();
    for (const auto& m : round.locals) {
      json comps = json::array();
      for (const auto& [key, choi] : m.process.components())
        comps.push_back({{"y", key.first}, {"x", key.second}, {"choi", write_complex_matrix(choi.matrix())}});
      locals.push_back({{"party", m.party},
                        {"classical_in", m.classical_in()},
                        {"classical_out", m.classical_out()},
                        {"quantum_in", m.quantum_in()},
                        {"quantum_out", m.quantum_out()},
                        {"components", std::move(comps)}});
    }
    rounds.push_back({{"global", write_real_matrix(round.global.matrix())}, {"locals", std::move(locals)}});
  }
  return {{"rounds", std::move(rounds)},
          {"post", write_real_matrix(protocol.post().matrix())},
          {"discard_quantum", protocol.discard_quantum()}};
}

json to_json(const Scenario& s) {
  json family = json::array();
  for (std::size_t k = 0; k < s.family.states.size(); ++k) {
    json amps = json::array();
    for (Eigen::Index j = 0; j < s.family.states[k].amplitudes().size(); ++j)
      amps.push_back(write_complex(s.family.states[k].amplitudes()(j)));
    family.push_back({{"label", s.family.labels[k]}, {"amplitudes", std::move(amps)}});
  }
  json protocols = json::array();
  for (const auto& np : s.protocols) {
    json p = to_json(np.protocol);
    p["name"] = np.name;
    protocols.push_back(std::move(p));
  }
  json meta = json::object();
  for (const auto& [k, v] : s.metadata) meta[k] = v;
  return {{"format_version", kScenarioFormatVersion},
          {"id", s.id},
          {"metadata", std::move(meta)},
          {"partition", s.partition().dims()},
          {"family", std::move(family)},
          {"protocols", std::move(protocols)}};
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario file " + path.string());
  out << to_json(scenario).dump(1) << '\n';
  if (!out) throw ScenarioError("write failed for " + path.string());
}

}  // namespace cpt
