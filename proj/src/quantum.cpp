#include "cpt/quantum.hpp"

#include <Eigen/Eigenvalues>

#include <sstream>

namespace cpt {

namespace {

CMatrix symmetrised(const CMatrix& m) { return (m + m.adjoint()) / 2.0; }

Real relative_scale(const CMatrix& m) { return std::max<Real>(1.0, max_abs(m)); }

void require_square(const CMatrix& m, Index dim, const char* what) {
  if (static_cast<Index>(m.rows()) != dim || static_cast<Index>(m.cols()) != dim) {
    std::ostringstream os;
    os << what << ": expected " << dim << "x" << dim << ", got " << m.rows() << "x"
       << m.cols();
    throw DimensionMismatch(os.str());
  }
}

// Choi of Phi^dagger: swap the input/output factors, then complex conjugate.
CMatrix adjoint_choi(const CMatrix& j, Index din, Index dout) {
  const Index dims[] = {din, dout};
  const Index swap[] = {1, 0};
  return permute_subsystems(j, dims, swap).conjugate();
}

// Choi of Phi_g after Phi_f: block (a, a') of the result is Phi_g applied to
// block (a, a') of J_f.
CMatrix link_product(const ChoiMatrix& f, const ChoiMatrix& g) {
  const Index da = f.input_dim(), db = f.output_dim(), dc = g.output_dim();
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(da * dc),
                              static_cast<Eigen::Index>(da * dc));
  for (Index a = 0; a < da; ++a)
    for (Index a2 = 0; a2 < da; ++a2) {
      CMatrix block = f.matrix().block(static_cast<Eigen::Index>(a * db),
                                       static_cast<Eigen::Index>(a2 * db),
                                       static_cast<Eigen::Index>(db),
                                       static_cast<Eigen::Index>(db));
      if (block.isZero(0)) continue;
      out.block(static_cast<Eigen::Index>(a * dc), static_cast<Eigen::Index>(a2 * dc),
                static_cast<Eigen::Index>(dc), static_cast<Eigen::Index>(dc)) =
          apply_choi(g, block);
    }
  return out;
}

// J_f (x) J_g reordered from (A1 B1 A2 B2) to (A1 A2 B1 B2).
CMatrix tensor_choi(const ChoiMatrix& f, const ChoiMatrix& g) {
  const Index dims[] = {f.input_dim(), f.output_dim(), g.input_dim(), g.output_dim()};
  const Index perm[] = {0, 2, 1, 3};
  return permute_subsystems(kron(f.matrix(), g.matrix()), dims, perm);
}

void require_types(const HybridProcess& f, const HybridProcess& g, const char* what) {
  if (!(f.source() == g.source()) || !(f.target() == g.target()))
    throw DimensionMismatch(std::string(what) + ": " + f.source().to_string() + " -> " +
                            f.target().to_string() + " vs " + g.source().to_string() +
                            " -> " + g.target().to_string());
}

}  // namespace

ChoiMatrix::ChoiMatrix(CMatrix entries, Index input_dim, Index output_dim)
    : input_dim_(input_dim), output_dim_(output_dim) {
  if (input_dim < 1 || output_dim < 1)
    throw InvariantViolation("ChoiMatrix: dimensions must be >= 1");
  require_square(entries, input_dim * output_dim, "ChoiMatrix");
  const Real scale = relative_scale(entries);
  if (!is_hermitian(entries, kHermitianTolerance * scale))
    throw InvariantViolation("ChoiMatrix: not Hermitian");
  entries = symmetrised(entries);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(entries);
  const auto& lambda = eig.eigenvalues();
  if (lambda.size() > 0 && lambda.minCoeff() < 0) {
    if (lambda.minCoeff() < -kPsdTolerance * scale) {
      std::ostringstream os;
      os << "ChoiMatrix: not positive semidefinite (eigenvalue " << lambda.minCoeff() << ")";
      throw InvariantViolation(os.str());
    }
    RVector clamped = lambda.cwiseMax(0.0);
    entries = eig.eigenvectors() * clamped.cast<Complex>().asDiagonal() *
              eig.eigenvectors().adjoint();
    entries = symmetrised(entries);
  }
  entries_ = std::move(entries);
}

ChoiMatrix ChoiMatrix::trusted(CMatrix entries, Index input_dim, Index output_dim) {
  require_square(entries, input_dim * output_dim, "ChoiMatrix");
  ChoiMatrix c;
  c.entries_ = symmetrised(entries);
  c.input_dim_ = input_dim;
  c.output_dim_ = output_dim;
  return c;
}

ChoiMatrix ChoiMatrix::zero(Index input_dim, Index output_dim) {
  const auto n = static_cast<Eigen::Index>(input_dim * output_dim);
  return trusted(CMatrix::Zero(n, n), input_dim, output_dim);
}

ChoiMatrix choi_from_kraus(std::span<const CMatrix> kraus, Index input_dim,
                           Index output_dim) {
  const auto n = static_cast<Eigen::Index>(input_dim * output_dim);
  CMatrix j = CMatrix::Zero(n, n);
  for (const auto& k : kraus) {
    if (static_cast<Index>(k.rows()) != output_dim ||
        static_cast<Index>(k.cols()) != input_dim) {
      std::ostringstream os;
      os << "choi_from_kraus: Kraus operator is " << k.rows() << "x" << k.cols()
         << ", expected " << output_dim << "x" << input_dim;
      throw DimensionMismatch(os.str());
    }
    const CVector v = vec(k);
    j += v * v.adjoint();
  }
  return ChoiMatrix::trusted(std::move(j), input_dim, output_dim);
}

CMatrix apply_choi(const ChoiMatrix& choi, const CMatrix& rho) {
  const Index din = choi.input_dim(), dout = choi.output_dim();
  require_square(rho, din, "apply_choi");
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dout), static_cast<Eigen::Index>(dout));
  for (Index j = 0; j < din; ++j)
    for (Index j2 = 0; j2 < din; ++j2) {
      const Complex w = rho(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j2));
      if (w == Complex(0)) continue;
      out += w * choi.matrix().block(static_cast<Eigen::Index>(j * dout),
                                     static_cast<Eigen::Index>(j2 * dout),
                                     static_cast<Eigen::Index>(dout),
                                     static_cast<Eigen::Index>(dout));
    }
  return out;
}

CMatrix apply_choi_on_factor(const ChoiMatrix& choi, const CMatrix& rho,
                             std::span<const Index> dims, Index party) {
  if (party >= dims.size()) throw DimensionMismatch("apply_choi_on_factor: party out of range");
  if (dims[party] != choi.input_dim())
    throw DimensionMismatch("apply_choi_on_factor: factor dimension does not match map input");
  Index left = 1, right = 1;
  for (Index k = 0; k < party; ++k) left *= dims[k];
  for (Index k = party + 1; k < dims.size(); ++k) right *= dims[k];
  const Index din = choi.input_dim(), dout = choi.output_dim();
  require_square(rho, left * din * right, "apply_choi_on_factor");

  const auto idx_in = [&](Index l, Index j, Index r) {
    return static_cast<Eigen::Index>((l * din + j) * right + r);
  };
  const auto idx_out = [&](Index l, Index k, Index r) {
    return static_cast<Eigen::Index>((l * dout + k) * right + r);
  };
  const auto n_out = static_cast<Eigen::Index>(left * dout * right);
  CMatrix out = CMatrix::Zero(n_out, n_out);
  const CMatrix& j = choi.matrix();
  for (Index l = 0; l < left; ++l)
    for (Index r = 0; r < right; ++r)
      for (Index l2 = 0; l2 < left; ++l2)
        for (Index r2 = 0; r2 < right; ++r2)
          for (Index a = 0; a < din; ++a)
            for (Index a2 = 0; a2 < din; ++a2) {
              const Complex w = rho(idx_in(l, a, r), idx_in(l2, a2, r2));
              if (w == Complex(0)) continue;
              for (Index k = 0; k < dout; ++k)
                for (Index k2 = 0; k2 < dout; ++k2)
                  out(idx_out(l, k, r), idx_out(l2, k2, r2)) +=
                      w * j(static_cast<Eigen::Index>(a * dout + k),
                            static_cast<Eigen::Index>(a2 * dout + k2));
            }
  return out;
}

DensityState::DensityState(CMatrix matrix) {
  if (matrix.rows() != matrix.cols()) throw DimensionMismatch("DensityState: not square");
  const Real scale = relative_scale(matrix);
  if (!is_hermitian(matrix, kHermitianTolerance * scale))
    throw InvariantViolation("DensityState: not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(symmetrised(matrix), Eigen::EigenvaluesOnly);
  if (matrix.size() > 0 && eig.eigenvalues().minCoeff() < -kPsdTolerance * scale)
    throw InvariantViolation("DensityState: not positive semidefinite");
  matrix_ = symmetrised(matrix);
}

DensityState DensityState::trusted(CMatrix matrix) {
  DensityState s;
  s.matrix_ = symmetrised(matrix);
  return s;
}

HybridProcess::HybridProcess(SystemType source, SystemType target, Components components)
    : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
  for (const auto& [key, choi] : components_) {
    if (key.first >= classical_out() || key.second >= classical_in()) {
      std::ostringstream os;
      os << "HybridProcess: component (" << key.first << ", " << key.second
         << ") outside classical range of " << source_.to_string() << " -> "
         << target_.to_string();
      throw DimensionMismatch(os.str());
    }
    if (choi.input_dim() != quantum_in() || choi.output_dim() != quantum_out())
      throw DimensionMismatch("HybridProcess: Choi dimensions do not match " +
                              source_.to_string() + " -> " + target_.to_string());
  }
}

HybridProcess HybridProcess::identity(const SystemType& s) {
  const Index d = s.quantum_dim();
  const CVector v = vec(CMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  const auto choi = ChoiMatrix::trusted(v * v.adjoint(), d, d);
  Components c;
  for (Index x = 0; x < s.classical_size(); ++x) c.emplace(Key{x, x}, choi);
  return {s, s, std::move(c)};
}

HybridProcess HybridProcess::discard(const SystemType& s) {
  const Index d = s.quantum_dim();
  const auto choi = ChoiMatrix::trusted(
      CMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)), d, 1);
  Components c;
  for (Index x = 0; x < s.classical_size(); ++x) c.emplace(Key{0, x}, choi);
  return {s, SystemType{}, std::move(c)};
}

HybridProcess HybridProcess::from_classical(const ClassicalProcess<Real>& f) {
  Components c;
  const auto& m = f.matrix();
  for (Eigen::Index x = 0; x < m.cols(); ++x)
    for (Eigen::Index y = 0; y < m.rows(); ++y)
      if (m(y, x) != 0)
        c.emplace(Key{static_cast<Index>(y), static_cast<Index>(x)},
                  ChoiMatrix::trusted(CMatrix::Constant(1, 1, m(y, x)), 1, 1));
  return {f.source(), f.target(), std::move(c)};
}

const ChoiMatrix* HybridProcess::component(Index y, Index x) const {
  auto it = components_.find(Key{y, x});
  return it == components_.end() ? nullptr : &it->second;
}

HybridProcess compose(const HybridProcess& f, const HybridProcess& g) {
  if (!(f.target() == g.source()))
    throw DimensionMismatch("compose: target " + f.target().to_string() +
                            " does not match source " + g.source().to_string());
  // Group g's components by their classical input for the sum over y.
  std::map<Index, std::vector<std::pair<Index, const ChoiMatrix*>>> g_by_input;
  for (const auto& [key, choi] : g.components())
    g_by_input[key.second].emplace_back(key.first, &choi);

  std::map<HybridProcess::Key, CMatrix> acc;
  for (const auto& [fkey, fchoi] : f.components()) {
    auto it = g_by_input.find(fkey.first);
    if (it == g_by_input.end()) continue;
    for (const auto& [z, gchoi] : it->second) {
      CMatrix linked = link_product(fchoi, *gchoi);
      auto [slot, inserted] = acc.try_emplace(HybridProcess::Key{z, fkey.second}, linked);
      if (!inserted) slot->second += linked;
    }
  }
  HybridProcess::Components out;
  for (auto& [key, m] : acc)
    out.emplace(key, ChoiMatrix::trusted(std::move(m), f.quantum_in(), g.quantum_out()));
  return {f.source(), g.target(), std::move(out)};
}

ChoiMatrix tensor(const ChoiMatrix& f, const ChoiMatrix& g) {
  return ChoiMatrix::trusted(tensor_choi(f, g), f.input_dim() * g.input_dim(),
                             f.output_dim() * g.output_dim());
}

HybridProcess tensor(const HybridProcess& f, const HybridProcess& g) {
  const Index gx = g.classical_in(), gy = g.classical_out();
  HybridProcess::Components out;
  for (const auto& [fk, fc] : f.components())
    for (const auto& [gk, gc] : g.components())
      out.emplace(HybridProcess::Key{fk.first * gy + gk.first, fk.second * gx + gk.second},
                  tensor(fc, gc));
  return {f.source() * g.source(), f.target() * g.target(), std::move(out)};
}

HybridProcess dagger(const HybridProcess& f) {
  HybridProcess::Components out;
  for (const auto& [key, choi] : f.components())
    out.emplace(HybridProcess::Key{key.second, key.first},
                ChoiMatrix::trusted(adjoint_choi(choi.matrix(), choi.input_dim(), choi.output_dim()),
                                    choi.output_dim(), choi.input_dim()));
  return {f.target(), f.source(), std::move(out)};
}

HybridProcess operator+(const HybridProcess& f, const HybridProcess& g) {
  require_types(f, g, "sum of processes");
  HybridProcess::Components out = f.components();
  for (const auto& [key, choi] : g.components()) {
    auto it = out.find(key);
    if (it == out.end())
      out.emplace(key, choi);
    else
      it->second = ChoiMatrix::trusted(it->second.matrix() + choi.matrix(), choi.input_dim(),
                                       choi.output_dim());
  }
  return {f.source(), f.target(), std::move(out)};
}

HybridProcess operator*(Real weight, const HybridProcess& f) {
  if (!(weight >= 0)) throw InvariantViolation("scaling by a negative weight leaves the cone");
  HybridProcess::Components out;
  if (weight != 0)
    for (const auto& [key, choi] : f.components())
      out.emplace(key, ChoiMatrix::trusted(weight * choi.matrix(), choi.input_dim(),
                                           choi.output_dim()));
  return {f.source(), f.target(), std::move(out)};
}

Real max_norm_distance(const HybridProcess& f, const HybridProcess& g) {
  require_types(f, g, "max_norm_distance");
  Real worst = 0;
  for (const auto& [key, choi] : f.components()) {
    const ChoiMatrix* other = g.component(key.first, key.second);
    worst = std::max(worst, other ? max_abs_diff(choi.matrix(), other->matrix())
                                  : max_abs(choi.matrix()));
  }
  for (const auto& [key, choi] : g.components())
    if (!f.component(key.first, key.second)) worst = std::max(worst, max_abs(choi.matrix()));
  return worst;
}

bool is_normalised(const HybridProcess& f, Real tol) {
  const Index din = f.quantum_in(), dout = f.quantum_out();
  std::vector<CMatrix> marginal(f.classical_in(),
                                CMatrix::Zero(static_cast<Eigen::Index>(din),
                                              static_cast<Eigen::Index>(din)));
  for (const auto& [key, choi] : f.components())
    marginal[key.second] += trace_second(choi.matrix(), din, dout);
  const CMatrix id = CMatrix::Identity(static_cast<Eigen::Index>(din), static_cast<Eigen::Index>(din));
  for (const auto& m : marginal)
    if (max_abs_diff(m, id) > tol) return false;
  return true;
}

bool is_pure(const HybridProcess& f, Real tol) {
  const ChoiMatrix* only = nullptr;
  std::size_t nonzero = 0;
  for (const auto& [key, choi] : f.components())
    if (max_abs(choi.matrix()) > tol) {
      ++nonzero;
      only = &choi;
    }
  if (nonzero == 0) throw ZeroProcess("is_pure: zero process");
  return nonzero == 1 && numerical_rank(only->matrix()) == 1;
}

std::optional<LinearCombination<HybridProcess>> impurity_witness(const HybridProcess& f) {
  using Term = LinearCombination<HybridProcess>::Term;
  std::vector<Term> terms;
  std::size_t nonzero_components = 0;
  bool any_mixed = false;
  for (const auto& [key, choi] : f.components()) {
    if (max_abs(choi.matrix()) == 0) continue;
    ++nonzero_components;
    if (numerical_rank(choi.matrix()) >= 2) any_mixed = true;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(choi.matrix());
    const Real top = eig.eigenvalues().maxCoeff();
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
      const Real lambda = eig.eigenvalues()(k);
      // Keep everything numerically visible so the terms recompose f.
      if (lambda <= 1e-15 * top) continue;
      const CVector v = eig.eigenvectors().col(k);
      HybridProcess::Components single;
      single.emplace(key, ChoiMatrix::trusted(v * v.adjoint(), choi.input_dim(), choi.output_dim()));
      terms.push_back({lambda, HybridProcess(f.source(), f.target(), std::move(single))});
    }
  }
  if (nonzero_components == 0) throw ZeroProcess("impurity_witness: zero process");
  if (nonzero_components == 1 && !any_mixed) return std::nullopt;
  return LinearCombination<HybridProcess>(std::move(terms));
}

HybridProcess cp_from_kraus(std::span<const CMatrix> kraus, Index input_dim, Index output_dim) {
  HybridProcess::Components c;
  if (!kraus.empty())
    c.emplace(HybridProcess::Key{0, 0}, choi_from_kraus(kraus, input_dim, output_dim));
  return {SystemType{quantum(input_dim)}, SystemType{quantum(output_dim)}, std::move(c)};
}

HybridProcess prepare_pure(const CVector& v) {
  if (v.size() == 0 || v.isZero(0)) throw InvariantViolation("prepare_pure: zero vector");
  const auto d = static_cast<Index>(v.size());
  HybridProcess::Components c;
  c.emplace(HybridProcess::Key{0, 0}, ChoiMatrix::trusted(v * v.adjoint(), 1, d));
  return {SystemType{}, SystemType{quantum(d)}, std::move(c)};
}

std::map<Index, DensityState> apply_to_state(const HybridProcess& f, Index x,
                                             const DensityState& rho) {
  if (rho.dim() != f.quantum_in()) {
    std::ostringstream os;
    os << "apply_to_state: state has dimension " << rho.dim() << ", process expects "
       << f.quantum_in();
    throw DimensionMismatch(os.str());
  }
  if (x >= f.classical_in()) throw DimensionMismatch("apply_to_state: classical input out of range");
  std::map<Index, DensityState> out;
  const auto dout = static_cast<Eigen::Index>(f.quantum_out());
  for (Index y = 0; y < f.classical_out(); ++y) {
    const ChoiMatrix* c = f.component(y, x);
    out.emplace(y, DensityState::trusted(c ? apply_choi(*c, rho.matrix())
                                           : CMatrix::Zero(dout, dout)));
  }
  return out;
}

}  // namespace cpt
