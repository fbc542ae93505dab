#include "cpt/errors.hpp"
#include "cpt/quantum.hpp"
#include "cpt/theory.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace cpt;

namespace {

CMatrix hs_ket(Index d, Index k) {
  CMatrix v = CMatrix::Zero(static_cast<Eigen::Index>(d), 1);
  v(static_cast<Eigen::Index>(k), 0) = 1;
  return v;
}

std::vector<CMatrix> depolarizing_kraus(Real p) {
  CMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  z << 1, 0, 0, -1;
  return {std::sqrt(1 - 3 * p / 4) * CMatrix::Identity(2, 2), std::sqrt(p / 4) * x,
          std::sqrt(p / 4) * y, std::sqrt(p / 4) * z};
}

// Z measurement keeping the post-measurement state.
HybridProcess z_instrument() {
  HybridProcess::Components c;
  for (Index y = 0; y < 2; ++y) {
    const CMatrix p = hs_ket(2, y) * hs_ket(2, y).adjoint();
    c.emplace(HybridProcess::Key{y, 0}, choi_from_kraus(std::vector<CMatrix>{p}, 2, 2));
  }
  return HybridProcess(SystemType{quantum(2)}, SystemType{classical(2), quantum(2)}, c);
}

}  // namespace

TEST_CASE("cp_from_kraus") {
  const HybridProcess id = cp_from_kraus(std::vector<CMatrix>{CMatrix::Identity(2, 2)}, 2, 2);
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = expected(0, 3) = expected(3, 0) = expected(3, 3) = 1;
  CHECK(max_abs_diff(id.component(0, 0)->matrix(), expected) == 0);
  CHECK(testing::eigen_rank(id.component(0, 0)->matrix()) == 1);
  CHECK(max_norm_distance(id, HybridProcess::identity(SystemType{quantum(2)})) == 0);

  const std::vector<CMatrix> dephase{hs_ket(2, 0) * hs_ket(2, 0).adjoint(), hs_ket(2, 1) * hs_ket(2, 1).adjoint()};
  CHECK(testing::eigen_rank(cp_from_kraus(dephase, 2, 2).component(0, 0)->matrix()) == 2);

  CHECK(cp_from_kraus(std::vector<CMatrix>{}, 2, 3).components().empty());
  CHECK_THROWS_AS(cp_from_kraus(std::vector<CMatrix>{CMatrix::Identity(2, 2), CMatrix::Identity(3, 2)}, 2, 2),
                  DimensionMismatch);
}

TEST_CASE("choi matrices are validated") {
  CMatrix nonherm = CMatrix::Zero(4, 4);
  nonherm(0, 1) = 1;
  CHECK_THROWS_AS(ChoiMatrix(nonherm, 2, 2), InvariantViolation);

  CMatrix negative = CMatrix::Identity(4, 4);
  negative(3, 3) = -1e-3;
  CHECK_THROWS_AS(ChoiMatrix(negative, 2, 2), InvariantViolation);

  CMatrix tiny = CMatrix::Identity(4, 4);
  tiny(3, 3) = -1e-12;
  const ChoiMatrix clamped(tiny, 2, 2);
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(clamped.matrix());
  CHECK(es.eigenvalues().minCoeff() >= 0);

  CHECK_THROWS_AS(ChoiMatrix(CMatrix::Identity(3, 3), 2, 2), DimensionMismatch);
}

TEST_CASE("apply_to_state") {
  std::mt19937_64 rng(21);
  const CMatrix rho = testing::random_density(3, rng);
  const auto same = apply_to_state(HybridProcess::identity(SystemType{quantum(3)}), 0, DensityState(rho));
  CHECK(max_abs_diff(same.at(0).matrix(), rho) < 1e-14);

  // Born rule on |+><+|: each outcome with weight 1/2 and the projected state.
  const CVector plus = (hs_ket(2, 0) + hs_ket(2, 1)) / std::numbers::sqrt2;
  const auto out = apply_to_state(z_instrument(), 0, DensityState(plus * plus.adjoint()));
  REQUIRE(out.size() == 2);
  for (Index y = 0; y < 2; ++y) {
    const CMatrix expected = 0.5 * hs_ket(2, y) * hs_ket(2, y).adjoint();
    CHECK(max_abs_diff(out.at(y).matrix(), expected) < 1e-15);
  }

  const HybridProcess zero(SystemType{quantum(2)}, SystemType{classical(2), quantum(2)});
  for (const auto& [y, st] : apply_to_state(zero, 0, DensityState(plus * plus.adjoint())))
    CHECK(max_abs(st.matrix()) == 0);

  CHECK_THROWS_AS(apply_to_state(z_instrument(), 0, DensityState(rho)), DimensionMismatch);
}

TEST_CASE("prepare_pure") {
  CHECK(max_abs_diff(prepare_pure(hs_ket(2, 0)).component(0, 0)->matrix(), CMatrix(hs_ket(2, 0) * hs_ket(2, 0).adjoint())) == 0);
  const CVector plus = (hs_ket(2, 0) + hs_ket(2, 1)) / std::numbers::sqrt2;
  CHECK(max_abs_diff(prepare_pure(plus).component(0, 0)->matrix(), CMatrix::Constant(2, 2, 0.5)) < 1e-15);

  const HybridProcess two = prepare_pure(2.0 * hs_ket(2, 0));
  CHECK(two.component(0, 0)->matrix()(0, 0).real() == doctest::Approx(4.0));
  CHECK(is_pure(two, 1e-12));
  CHECK_THROWS_AS(prepare_pure(CVector::Zero(2)), InvariantViolation);
}

TEST_CASE("dagger of a preparation is the Born effect") {
  std::mt19937_64 rng(22);
  const CVector psi = random_unit_vector(3, rng);
  const HybridProcess effect = dagger(prepare_pure(psi));
  CHECK(effect.quantum_in() == 3);
  CHECK(effect.quantum_out() == 1);
  const CMatrix rho = testing::random_density(3, rng);
  const Complex born = (psi.adjoint() * rho * psi)(0, 0);
  const auto out = apply_to_state(effect, 0, DensityState(rho));
  CHECK(std::abs(out.at(0).matrix()(0, 0) - born) < 1e-14);
}

TEST_CASE("dagger of the trace is the identity Choi") {
  for (Index d : {1, 2, 4}) {
    const SystemType s{quantum(d)};
    const HybridProcess mixed = reversed_discard<HybridProcess>(s);
    const auto dd = static_cast<Eigen::Index>(d);
    CHECK(max_abs_diff(mixed.component(0, 0)->matrix(), CMatrix::Identity(dd, dd)) == 0);
    CHECK(mixed.quantum_out() == d);
  }
}

TEST_CASE("dagger is an involution on random hybrid processes") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const SystemType a = testing::random_system_type(rng), b = testing::random_system_type(rng);
    const HybridProcess f = testing::random_hybrid(a, b, rng);
    CHECK(max_norm_distance(dagger(dagger(f)), f) <= 1e-12);
  }
}

TEST_CASE("dagger is the Hilbert-Schmidt adjoint") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    const Index din = 1 + random_index(3, rng), dout = 1 + random_index(3, rng);
    const auto kraus = testing::random_instrument_kraus(1, 1, din, dout, rng)[0][0];
    std::vector<CMatrix> scaled;
    for (const auto& k : kraus) scaled.push_back(1.7 * k);
    const HybridProcess f = cp_from_kraus(scaled, din, dout);
    const HybridProcess fd = dagger(f);

    const CMatrix a = random_ginibre(din, din, rng), b = random_ginibre(dout, dout, rng);
    const CMatrix fa = testing::apply_kraus(scaled, a);
    const CMatrix fdb = testing::apply_kraus_adjoint(scaled, b);
    CHECK(max_abs_diff(apply_choi(*f.component(0, 0), a), fa) < 1e-12);
    CHECK(max_abs_diff(apply_choi(*fd.component(0, 0), b), fdb) < 1e-12);
    const Complex lhs = (fa.adjoint() * b).trace();
    const Complex rhs = (a.adjoint() * apply_choi(*fd.component(0, 0), b)).trace();
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("classical indices transpose under the dagger") {
  std::mt19937_64 rng(25);
  const SystemType s{classical(2), quantum(2)}, t{classical(3), quantum(3)};
  const HybridProcess f = testing::random_hybrid(s, t, rng);
  const HybridProcess fd = dagger(f);
  for (const auto& [key, choi] : f.components()) {
    const ChoiMatrix* back = fd.component(key.second, key.first);
    REQUIRE(back != nullptr);
    CHECK(back->input_dim() == 3);
    CHECK(back->output_dim() == 2);
  }
  const HybridProcess c = HybridProcess::from_classical(ClassicalProcess<Real>(RMatrix::Constant(3, 2, 0.25)));
  CHECK(dagger(c).classical_in() == 3);
  CHECK(dagger(c).classical_out() == 2);
}

TEST_CASE("normalisation means trace preservation summed over outcomes") {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 60; ++trial) {
    const SystemType a = testing::random_system_type(rng), b = testing::random_system_type(rng);
    const HybridProcess f = testing::random_hybrid(a, b, rng);
    bool preserves = true;
    for (Index x = 0; x < a.classical_size(); ++x) {
      const CMatrix rho = testing::random_density(a.quantum_dim(), rng);
      Real total = 0;
      for (const auto& [y, st] : apply_to_state(f, x, DensityState(rho))) total += st.trace();
      preserves = preserves && std::abs(total - 1) <= 1e-9;
    }
    // A random state can satisfy a failing process by accident only on a null set.
    CHECK(is_normalised(f, 1e-9) == preserves);
  }
}

TEST_CASE("purity matches the Choi rank") {
  const std::vector<CMatrix> dep = depolarizing_kraus(0.5);
  const HybridProcess f = cp_from_kraus(dep, 2, 2);
  CHECK(testing::eigen_rank(f.component(0, 0)->matrix()) == 4);
  CHECK_FALSE(is_pure(f, 1e-12));
  const auto w = impurity_witness(f);
  REQUIRE(w);
  CHECK(w->size() == 4);
  CHECK(max_norm_distance(linear_combine(*w), f) < 1e-9);

  std::mt19937_64 rng(27);
  const CMatrix u = random_unitary(2, rng);
  const HybridProcess unitary = cp_from_kraus(std::vector<CMatrix>{u}, 2, 2);
  CHECK(is_pure(unitary, 1e-12));
  CHECK_FALSE(impurity_witness(unitary));

  // Two outcomes each of rank one: still impure.
  CHECK_FALSE(is_pure(z_instrument(), 1e-12));
  const auto wz = impurity_witness(z_instrument());
  REQUIRE(wz);
  CHECK(wz->size() == 2);

  CHECK_THROWS_AS(is_pure(HybridProcess(SystemType{quantum(2)}, SystemType{quantum(2)}), 1e-12), ZeroProcess);
  CHECK_THROWS_AS(impurity_witness(HybridProcess(SystemType{quantum(2)}, SystemType{quantum(2)})), ZeroProcess);
}

TEST_CASE("witness terms recompose and are pairwise non-proportional") {
  std::mt19937_64 rng(28);
  for (int trial = 0; trial < 60; ++trial) {
    const Index din = 1 + random_index(2, rng), dout = 1 + random_index(2, rng);
    const Index rank = 1 + random_index(din * dout, rng);
    const HybridProcess f(SystemType{quantum(din)}, SystemType{quantum(dout)},
                          {{{0, 0}, ChoiMatrix(random_psd(din * dout, rank, rng), din, dout)}});
    const Index r = testing::eigen_rank(f.component(0, 0)->matrix());
    CHECK(is_pure(f, 1e-12) == (r == 1));
    const auto w = impurity_witness(f);
    CHECK(static_cast<bool>(w) == (r >= 2));
    if (!w) continue;
    CHECK(max_norm_distance(linear_combine(*w), f) < 1e-9);
    const auto& terms = w->terms();
    for (std::size_t i = 0; i < terms.size(); ++i)
      for (std::size_t j = i + 1; j < terms.size(); ++j) {
        const CVector a = vec(terms[i].process.component(0, 0)->matrix());
        const CVector b = vec(terms[j].process.component(0, 0)->matrix());
        const Real cosine = std::abs(a.dot(b)) / (a.norm() * b.norm());
        CHECK(cosine < 1 - 1e-9);
      }
  }
}

TEST_CASE("Choi composition agrees with Kraus composition") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    const Index d1 = 1 + random_index(3, rng), d2 = 1 + random_index(3, rng), d3 = 1 + random_index(3, rng);
    const auto k = testing::random_instrument_kraus(1, 1, d1, d2, rng)[0][0];
    const auto l = testing::random_instrument_kraus(1, 1, d2, d3, rng)[0][0];
    std::vector<CMatrix> lk;
    for (const auto& b : l)
      for (const auto& a : k) lk.push_back(b * a);
    const HybridProcess composed = compose(cp_from_kraus(k, d1, d2), cp_from_kraus(l, d2, d3));
    CHECK(max_norm_distance(composed, cp_from_kraus(lk, d1, d3)) < 1e-9);

    std::vector<CMatrix> kl;
    for (const auto& a : k)
      for (const auto& b : l) kl.push_back(kron(a, b));
    const HybridProcess tensored = tensor(cp_from_kraus(k, d1, d2), cp_from_kraus(l, d2, d3));
    CHECK(max_abs_diff(tensored.component(0, 0)->matrix(),
                       choi_from_kraus(kl, d1 * d2, d2 * d3).matrix()) < 1e-9);
  }
}

TEST_CASE("hybrid composition sums over the classical wire") {
  std::mt19937_64 rng(30);
  const Index x = 2, y = 3, z = 2, d1 = 2, d2 = 3, d3 = 2;
  const auto kf = testing::random_instrument_kraus(x, y, d1, d2, rng);
  const auto kg = testing::random_instrument_kraus(y, z, d2, d3, rng);
  const SystemType a{classical(x), quantum(d1)}, b{classical(y), quantum(d2)}, c{classical(z), quantum(d3)};
  const HybridProcess f = testing::from_kraus_family(a, b, kf), g = testing::from_kraus_family(b, c, kg);

  testing::KrausFamily expected(z, std::vector<std::vector<CMatrix>>(x));
  for (Index zi = 0; zi < z; ++zi)
    for (Index xi = 0; xi < x; ++xi)
      for (Index yi = 0; yi < y; ++yi)
        for (const auto& p : kf[yi][xi])
          for (const auto& q : kg[zi][yi]) expected[zi][xi].push_back(q * p);
  const HybridProcess gf = compose(f, g);
  CHECK(max_norm_distance(gf, testing::from_kraus_family(a, c, expected)) < 1e-9);
  CHECK(is_normalised(gf, 1e-9));
}

TEST_CASE("apply_choi_on_factor acts locally") {
  std::mt19937_64 rng(31);
  const auto k = testing::random_instrument_kraus(1, 1, 2, 3, rng)[0][0];
  const ChoiMatrix choi = choi_from_kraus(k, 2, 3);
  const CMatrix rho = testing::random_density(6, rng);
  const std::vector<Index> dims{3, 2};
  std::vector<CMatrix> lifted;
  for (const auto& m : k) lifted.push_back(kron(CMatrix::Identity(3, 3), m));
  CHECK(max_abs_diff(apply_choi_on_factor(choi, rho, dims, 1), testing::apply_kraus(lifted, rho)) < 1e-12);
}
