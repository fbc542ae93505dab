#include "cpt/states.hpp"

#include "cpt/errors.hpp"

#include <algorithm>
#include <sstream>

namespace cpt {

namespace {

// Amplitude matrix with the cut parties as rows.
CMatrix reshape_across(const PureState& psi, const std::vector<Index>& cut) {
  const auto& dims = psi.partition().dims();
  const Index n = dims.size();
  std::vector<bool> in_cut(n, false);
  for (Index p : cut) {
    if (p >= n) throw InvariantViolation("schmidt_rank: party index out of range");
    if (in_cut[p]) throw InvariantViolation("schmidt_rank: repeated party in cut");
    in_cut[p] = true;
  }
  if (cut.empty() || cut.size() == n)
    throw InvariantViolation("schmidt_rank: bipartition must be nonempty and proper");
  std::vector<Index> perm(cut.begin(), cut.end());
  Index left = 1;
  for (Index p : cut) left *= dims[p];
  for (Index p = 0; p < n; ++p)
    if (!in_cut[p]) perm.push_back(p);
  const CVector permuted = permute_vector(psi.amplitudes(), dims, perm);
  const Index right = psi.partition().total_dim() / left;
  // Row index is the cut multi-index, the most significant part.
  CMatrix m(static_cast<Eigen::Index>(left), static_cast<Eigen::Index>(right));
  for (Index r = 0; r < left; ++r)
    for (Index c = 0; c < right; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          permuted(static_cast<Eigen::Index>(r * right + c));
  return m;
}

std::vector<Index> prefix(Index k) {
  std::vector<Index> cut(k);
  for (Index p = 0; p < k; ++p) cut[p] = p;
  return cut;
}

}  // namespace

PartyPartition::PartyPartition(std::vector<Index> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw InvariantViolation("PartyPartition: at least one party required");
  for (Index d : dims_)
    if (d < 1) throw InvariantViolation("PartyPartition: dimensions must be >= 1");
}

PureState::PureState(CVector amplitudes, PartyPartition partition)
    : amplitudes_(std::move(amplitudes)), partition_(std::move(partition)) {
  if (static_cast<Index>(amplitudes_.size()) != partition_.total_dim()) {
    std::ostringstream os;
    os << "PureState: " << amplitudes_.size() << " amplitudes for total dimension "
       << partition_.total_dim();
    throw DimensionMismatch(os.str());
  }
  if (amplitudes_.isZero(0)) throw InvariantViolation("PureState: zero vector");
}

Index OrthonormalFamily::index_of(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw PreconditionFailed("unknown label '" + label + "'");
  return static_cast<Index>(it - labels.begin());
}

CVector tensor_all(const std::vector<CVector>& factors) {
  CVector out = CVector::Ones(1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

RVector schmidt_coefficients(const PureState& psi, const std::vector<Index>& cut) {
  Eigen::JacobiSVD<CMatrix> svd(reshape_across(psi, cut));
  return svd.singularValues();
}

Index schmidt_rank(const PureState& psi, const std::vector<Index>& cut, Real tol) {
  return numerical_rank(reshape_across(psi, cut), tol);
}

std::optional<ProductFactorization> product_factorize(const PureState& psi, Real tol) {
  const auto& dims = psi.partition().dims();
  ProductFactorization out;
  CVector rest = psi.amplitudes();
  for (Index p = 0; p + 1 < dims.size(); ++p) {
    const Index left = dims[p];
    const Index right = static_cast<Index>(rest.size()) / left;
    CMatrix m(static_cast<Eigen::Index>(left), static_cast<Eigen::Index>(right));
    for (Index r = 0; r < left; ++r)
      for (Index c = 0; c < right; ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            rest(static_cast<Eigen::Index>(r * right + c));
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (numerical_rank(m) != 1) return std::nullopt;
    // m ~ s u v^dagger, so psi = u (x) s conj(v).
    out.factors.push_back(svd.matrixU().col(0));
    rest = svd.singularValues()(0) * svd.matrixV().col(0).conjugate();
  }
  out.factors.push_back(rest);
  if (max_abs_diff(tensor_all(out.factors), psi.amplitudes()) >= tol) return std::nullopt;
  return out;
}

bool FamilyReport::all_product() const {
  return std::all_of(members.begin(), members.end(),
                     [](const FamilyMember& m) { return m.product; });
}

std::vector<std::string> FamilyReport::entangled_labels() const {
  std::vector<std::string> out;
  for (const auto& m : members)
    if (!m.product) out.push_back(m.label);
  return out;
}

FamilyReport check_family(const OrthonormalFamily& family, Real tol) {
  FamilyReport report;
  report.expected_size = family.partition.total_dim();
  report.actual_size = family.states.size();
  report.complete = report.actual_size == report.expected_size &&
                    family.labels.size() == family.states.size();
  for (const auto& s : family.states)
    if (!(s.partition() == family.partition)) report.partitions_consistent = false;

  const auto n = static_cast<Eigen::Index>(family.states.size());
  if (report.partitions_consistent && n > 0) {
    CMatrix basis(static_cast<Eigen::Index>(family.partition.total_dim()), n);
    for (Eigen::Index k = 0; k < n; ++k) basis.col(k) = family.states[static_cast<Index>(k)].amplitudes();
    const CMatrix gram = basis.adjoint() * basis;
    report.gram_deviation = max_abs_diff(gram, CMatrix::Identity(n, n));
    report.orthonormal = report.gram_deviation < tol;
  }

  const Index parties = family.partition.parties();
  for (std::size_t k = 0; k < family.states.size(); ++k) {
    FamilyMember m;
    m.label = k < family.labels.size() ? family.labels[k] : std::to_string(k);
    const auto& psi = family.states[k];
    for (Index cut = 1; cut < psi.partition().parties() && parties > 1; ++cut) {
      const Index r = schmidt_rank(psi, prefix(cut));
      if (r > m.max_schmidt_rank) m.max_schmidt_rank = r;
      if (r >= 2 && m.entangled_cut == 0) m.entangled_cut = cut;
    }
    m.product = m.entangled_cut == 0 && product_factorize(psi, tol).has_value();
    report.members.push_back(std::move(m));
  }
  return report;
}

}  // namespace cpt
