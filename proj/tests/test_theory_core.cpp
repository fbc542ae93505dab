#include "cpt/classical.hpp"
#include "cpt/errors.hpp"
#include "cpt/quantum.hpp"
#include "cpt/theory.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace cpt;
using Classical = ClassicalProcess<Real>;

namespace {

RMatrix mat(std::initializer_list<std::initializer_list<Real>> rows) {
  RMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (Real v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

RMatrix random_nonneg(Index rows, Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<Real> u(0, 1);
  RMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
  return m;
}

Classical random_classical(const SystemType& s, const SystemType& t, std::mt19937_64& rng) {
  return Classical(s, t, random_nonneg(t.classical_size(), s.classical_size(), rng));
}

SystemType random_classical_type(std::mt19937_64& rng) {
  std::vector<Factor> f;
  const Index n = random_index(4, rng);
  for (Index k = 0; k < n; ++k) f.push_back(classical(1 + random_index(3, rng)));
  return SystemType(f);
}

}  // namespace

TEST_CASE("system types") {
  const SystemType a{classical(2), quantum(3)};
  CHECK(a.classical_size() == 2);
  CHECK(a.quantum_dim() == 3);
  CHECK(a.to_string() == "C2 x Q3");
  CHECK(SystemType{}.is_unit());
  CHECK(SystemType{}.to_string() == "I");
  CHECK((SystemType{classical(2)} * SystemType{quantum(2)}).factors().size() == 2);
  CHECK(SystemType{classical(1), quantum(2)} == SystemType{quantum(2)});
  CHECK_FALSE(SystemType{classical(2), classical(3)} == SystemType{classical(3), classical(2)});
  CHECK_THROWS_AS(SystemType{classical(0)}, InvariantViolation);
}

TEST_CASE("classical processes reject negative entries and bad shapes") {
  CHECK_THROWS_AS(Classical(mat({{0.5, -0.1}})), InvariantViolation);
  CHECK_THROWS_AS(Classical(SystemType{classical(2)}, SystemType{classical(2)}, RMatrix::Ones(3, 2)),
                  DimensionMismatch);
  CHECK_THROWS_AS(Classical(SystemType{quantum(2)}, SystemType{classical(2)}, RMatrix::Ones(2, 1)),
                  InvariantViolation);
}

TEST_CASE("compose") {
  std::mt19937_64 rng(1);
  const SystemType x{classical(3)}, y{classical(2)};
  const Classical f = random_classical(x, y, rng);
  CHECK(max_norm_distance(compose(Classical::identity(x), f), f) == 0);

  const Classical swap(mat({{0, 1}, {1, 0}}));
  CHECK(compose(swap, swap).matrix() == RMatrix::Identity(2, 2));

  RMatrix p = random_nonneg(3, 4, rng), q = random_nonneg(2, 3, rng);
  p = (p * p.colwise().sum().cwiseInverse().asDiagonal()).eval();
  q = (q * q.colwise().sum().cwiseInverse().asDiagonal()).eval();
  const Classical pq = compose(Classical(p), Classical(q));
  const RMatrix direct = q * p;
  CHECK(max_abs_diff(pq.matrix(), direct) < 1e-15);
  for (Eigen::Index c = 0; c < direct.cols(); ++c) CHECK(direct.col(c).sum() == doctest::Approx(1.0));
  CHECK(is_normalised(pq, 1e-12));

  try {
    compose(f, Classical(SystemType{classical(4)}, y, RMatrix::Ones(2, 4)));
    FAIL("expected a dimension mismatch");
  } catch (const DimensionMismatch& e) {
    CHECK(std::string(e.what()).find("C2") != std::string::npos);
    CHECK(std::string(e.what()).find("C4") != std::string::npos);
  }
}

TEST_CASE("compose is associative and tensor is bifunctorial") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const SystemType a = random_classical_type(rng), b = random_classical_type(rng),
                     c = random_classical_type(rng), d = random_classical_type(rng);
    const Classical f = random_classical(a, b, rng), g = random_classical(b, c, rng),
                    h = random_classical(c, d, rng);
    CHECK(max_norm_distance(compose(compose(f, g), h), compose(f, compose(g, h))) < 1e-12);

    const Classical k = random_classical(d, a, rng), m = random_classical(a, d, rng);
    const Classical lhs = compose(tensor(f, k), tensor(g, m));
    const Classical rhs = tensor(compose(f, g), compose(k, m));
    CHECK(max_norm_distance(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("tensor") {
  std::mt19937_64 rng(3);
  const Classical f = random_classical(SystemType{classical(2)}, SystemType{classical(3)}, rng);
  CHECK(max_norm_distance(tensor(f, Classical::identity(SystemType{})), f) == 0);

  const SystemType two{classical(2)};
  const Classical d01 = tensor(Classical::delta(two, 0), Classical::delta(two, 1));
  CHECK(d01.matrix() == Classical::delta(SystemType{classical(4)}, 1).matrix());

  // (f x g) o (h x k) = (f o h) x (g o k), written here as compositions of 2x2 matrices.
  const RMatrix fm = random_nonneg(2, 2, rng), gm = random_nonneg(2, 2, rng);
  const RMatrix hm = random_nonneg(2, 2, rng), km = random_nonneg(2, 2, rng);
  const Classical lhs = compose(tensor(Classical(hm), Classical(km)), tensor(Classical(fm), Classical(gm)));
  RMatrix expected(4, 4);
  const RMatrix fh = fm * hm, gk = gm * km;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) expected.block(2 * i, 2 * j, 2, 2) = fh(i, j) * gk;
  CHECK(max_abs_diff(lhs.matrix(), expected) < 1e-14);
}

TEST_CASE("linear combinations") {
  std::mt19937_64 rng(4);
  const SystemType two{classical(2)};
  const Classical f = random_classical(two, two, rng);
  CHECK(max_norm_distance(linear_combine(LinearCombination<Classical>({{1.0, f}})), f) == 0);

  const Classical mix = linear_combine(LinearCombination<Classical>(
      {{0.5, Classical::delta(two, 0)}, {0.5, Classical::delta(two, 1)}}));
  CHECK(mix.matrix() == RMatrix::Constant(2, 1, 0.5));

  // A state rebuilt from the resolution of the identity.
  const SystemType three{classical(3)};
  const Classical state(SystemType{}, three, mat({{0.2}, {0.0}, {1.3}}));
  std::vector<LinearCombination<Classical>::Term> terms;
  for (const auto& [ket, bra] : identity_resolution<Real>(three))
    terms.push_back({compose(state, bra).matrix()(0, 0), ket});
  CHECK(max_norm_distance(linear_combine(LinearCombination<Classical>(terms)), state) == 0);

  CHECK_THROWS_AS(LinearCombination<Classical>({{1.0, Classical::delta(two, 0)},
                                                {1.0, Classical::delta(three, 0)}}),
                  DimensionMismatch);
  CHECK_THROWS_AS(LinearCombination<Classical>({{-1.0, f}}), InvariantViolation);
  CHECK_THROWS(linear_combine(LinearCombination<Classical>(std::vector<LinearCombination<Classical>::Term>{})));
}

TEST_CASE("compose and tensor distribute over sums") {
  std::mt19937_64 rng(5);
  const SystemType a{classical(2)}, b{classical(3)};
  const Classical f = random_classical(a, b, rng), g = random_classical(a, b, rng);
  const Classical h = random_classical(b, a, rng);
  CHECK(max_norm_distance(compose(0.3 * f + 2.0 * g, h), 0.3 * compose(f, h) + 2.0 * compose(g, h)) < 1e-14);
  CHECK(max_norm_distance(tensor(f + g, h), tensor(f, h) + tensor(g, h)) < 1e-14);
}

TEST_CASE("discarding") {
  const SystemType two{classical(2)};
  const Classical p(SystemType{}, two, mat({{0.3}, {0.7}}));
  CHECK(compose(p, Classical::discard(two)).matrix()(0, 0) == doctest::Approx(1.0));
  CHECK(Classical::discard(SystemType{}).matrix() == RMatrix::Ones(1, 1));
  CHECK(HybridProcess::discard(SystemType{}).component(0, 0)->matrix() == CMatrix::Ones(1, 1));

  std::mt19937_64 rng(6);
  const CMatrix rho = testing::random_density(2, rng);
  const auto out = apply_to_state(HybridProcess::discard(SystemType{quantum(2)}), 0, DensityState(rho));
  CHECK(out.at(0).matrix()(0, 0).real() == doctest::Approx(rho.trace().real()));
}

TEST_CASE("environment structure holds on random system types") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const SystemType a = testing::random_system_type(rng), b = testing::random_system_type(rng);
    const auto lhs = Classical::discard(SystemType::classical_only(a.classical_sizes()) *
                                        SystemType::classical_only(b.classical_sizes()));
    const auto rhs = tensor(Classical::discard(SystemType::classical_only(a.classical_sizes())),
                            Classical::discard(SystemType::classical_only(b.classical_sizes())));
    CHECK(max_norm_distance(lhs, rhs) == 0);
    CHECK(max_norm_distance(HybridProcess::discard(a * b),
                            tensor(HybridProcess::discard(a), HybridProcess::discard(b))) <= 1e-12);
  }
}

TEST_CASE("normalised and unital") {
  CHECK(is_normalised(Classical(mat({{0.2, 0.5}, {0.8, 0.5}})), 1e-9));
  CHECK_FALSE(is_normalised(Classical(mat({{0.2, 0.5}, {0.7, 0.5}})), 1e-9));
  CHECK(is_normalised(HybridProcess::identity(SystemType{quantum(3)}), 1e-12));

  CHECK(is_unital(Classical(mat({{0.2, 0.8}, {0.5, 0.5}})), 1e-9));
  std::mt19937_64 rng(8);
  const CMatrix u = random_unitary(3, rng);
  CHECK(is_unital(cp_from_kraus(std::vector<CMatrix>{u}, 3, 3), 1e-9));

  // Amplitude damping: sum K K^dagger = diag(1 + g, 1 - g) != I.
  const Real g = 0.3;
  CMatrix k0 = CMatrix::Zero(2, 2), k1 = CMatrix::Zero(2, 2);
  k0(0, 0) = 1;
  k0(1, 1) = std::sqrt(1 - g);
  k1(0, 1) = std::sqrt(g);
  const std::vector<CMatrix> damping{k0, k1};
  const CMatrix kk = k0 * k0.adjoint() + k1 * k1.adjoint();
  REQUIRE(std::abs(kk(0, 0) - 1.0) > 0.1);
  const HybridProcess f = cp_from_kraus(damping, 2, 2);
  CHECK(is_normalised(f, 1e-12));
  CHECK_FALSE(is_unital(f, 1e-9));
}

TEST_CASE("dagger") {
  const Classical f(mat({{0.2, 0.5}, {0.8, 0.5}}));
  CHECK(dagger(f).matrix() == mat({{0.2, 0.8}, {0.5, 0.5}}));
  CHECK(dagger(Classical::discard(SystemType{classical(5)})).matrix() == RMatrix::Ones(5, 1));
  CHECK(reversed_discard<Classical>(SystemType{classical(5)}).matrix() == RMatrix::Ones(5, 1));

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const SystemType a = random_classical_type(rng), b = random_classical_type(rng),
                     c = random_classical_type(rng);
    const Classical p = random_classical(a, b, rng), q = random_classical(b, c, rng);
    CHECK(max_norm_distance(dagger(dagger(p)), p) == 0);
    CHECK(max_norm_distance(dagger(compose(p, q)), compose(dagger(q), dagger(p))) == 0);
    CHECK(max_norm_distance(dagger(tensor(p, q)), tensor(dagger(p), dagger(q))) == 0);
    const Classical p2 = random_classical(a, b, rng);
    CHECK(max_norm_distance(dagger(0.7 * p + p2), 0.7 * dagger(p) + dagger(p2)) == 0);
  }
}

TEST_CASE("dagger laws on hybrid processes") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 40; ++trial) {
    const SystemType a = testing::random_system_type(rng, 2), b = testing::random_system_type(rng, 2),
                     c = testing::random_system_type(rng, 2);
    const HybridProcess p = testing::random_hybrid(a, b, rng), q = testing::random_hybrid(b, c, rng);
    CHECK(max_norm_distance(dagger(dagger(p)), p) <= 1e-12);
    CHECK(max_norm_distance(dagger(compose(p, q)), compose(dagger(q), dagger(p))) <= 1e-12);
    CHECK(max_norm_distance(dagger(tensor(p, q)), tensor(dagger(p), dagger(q))) <= 1e-12);
  }
}

TEST_CASE("normalised and unital are exchanged by the dagger") {
  std::mt19937_64 rng(11);
  int normalised = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const SystemType a = testing::random_system_type(rng), b = testing::random_system_type(rng);
    const HybridProcess f = testing::random_hybrid(a, b, rng);
    const bool n = is_normalised(f, 1e-9);
    normalised += n;
    CHECK(n == is_unital(dagger(f), 1e-9));
  }
  CHECK(normalised > 10);
  CHECK(normalised < 90);
}

TEST_CASE("classical purity") {
  const SystemType two{classical(2)};
  CHECK(is_pure(Classical::delta(two, 1, 2.0), 1e-12));
  const Classical half(SystemType{}, two, mat({{0.5}, {0.5}}));
  CHECK_FALSE(is_pure(half, 1e-12));
  CHECK_THROWS_AS(is_pure(Classical(SystemType{}, two, RMatrix::Zero(2, 1)), 1e-12), ZeroProcess);

  const auto w = impurity_witness(half);
  REQUIRE(w);
  REQUIRE(w->size() == 2);
  CHECK(w->terms()[0].coefficient == doctest::Approx(0.5));
  CHECK(w->terms()[0].process.matrix() == Classical::delta(two, 0).matrix());
  CHECK(w->terms()[1].process.matrix() == Classical::delta(two, 1).matrix());
  CHECK_FALSE(impurity_witness(Classical::delta(two, 1, 2.0)));
}

TEST_CASE("identity resolution") {
  const auto one = identity_resolution<Real>(SystemType{});
  REQUIRE(one.size() == 1);
  CHECK(one[0].first.matrix() == RMatrix::Ones(1, 1));
  CHECK(one[0].second.matrix() == RMatrix::Ones(1, 1));

  for (Index n : {2, 5}) {
    const SystemType s{classical(n)};
    const auto res = identity_resolution<Real>(s);
    REQUIRE(res.size() == n);
    RMatrix sum = RMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& [ket, bra] : res) sum += ket.matrix() * bra.matrix();
    CHECK(sum == RMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }
  const auto two = identity_resolution<Real>(SystemType{classical(2)});
  CHECK(two[1].second.matrix() == mat({{0, 1}}));
}

TEST_CASE("cone closure of hybrid combinations") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const SystemType a = testing::random_system_type(rng, 2), b = testing::random_system_type(rng, 2);
    const HybridProcess f = testing::random_hybrid(a, b, rng), g = testing::random_hybrid(a, b, rng);
    const HybridProcess sum = linear_combine(LinearCombination<HybridProcess>({{0.3, f}, {1.7, g}}));
    for (const auto& [key, choi] : sum.components()) {
      const Eigen::SelfAdjointEigenSolver<CMatrix> es(choi.matrix());
      CHECK(es.eigenvalues().minCoeff() >= -1e-10 * std::max<Real>(1, max_abs(choi.matrix())));
    }
  }
}

TEST_CASE("processes over single precision") {
  using F = ClassicalProcess<float>;
  Eigen::MatrixXf m(2, 2);
  m << 0.25f, 0.5f, 0.75f, 0.5f;
  const F f(m);
  CHECK(is_normalised(compose(f, f), 1e-6f));
  CHECK(is_normalised(dagger(F(Eigen::MatrixXf(m.transpose()))), 1e-6f));
}
