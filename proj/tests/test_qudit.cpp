#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "qsdc/qudit.hpp"
#include "test_util.hpp"

using namespace qsdc;
using qsdc::test::expect_state_near;
using qsdc::test::expect_states_near;
using qsdc::test::random_state;

namespace {
const cx kOne{1.0, 0.0};
const cx kZero{0.0, 0.0};
const cx kI{0.0, 1.0};
}  // namespace

// ---------- RandomStream ----------

TEST(RandomStream, SameSeedReplaysExactly) {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, DerivedStreamsAreIndependentOfDrawOrder) {
  RandomStream root(7);
  RandomStream child_before = root.derive("x");
  root.next_u64();
  root.next_u64();
  RandomStream child_after = root.derive("x");
  for (int i = 0; i < 10; ++i)
    ASSERT_EQ(child_before.next_u64(), child_after.next_u64());
}

TEST(RandomStream, DifferentNamesGiveDifferentStreams) {
  RandomStream root(7);
  EXPECT_NE(root.derive("a").next_u64(), root.derive("b").next_u64());
  EXPECT_NE(root.derive("a", 0).next_u64(), root.derive("a", 1).next_u64());
}

TEST(RandomStream, UniformIntInRangeAndRoughlyUniform) {
  RandomStream rng(3);
  std::array<int, 5> counts{};
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const int v = rng.uniform_int(5);
    ASSERT_GE(v, 0);
    ASSERT_LT(v, 5);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c / double(n), 0.2, 0.01);
  EXPECT_THROW(rng.uniform_int(0), std::domain_error);
}

// ---------- basis states ----------

TEST(States, MakeZState) {
  expect_state_near(make_z_state(Symbol(0)), {kOne, kZero, kZero, kZero});
  expect_state_near(make_z_state(Symbol(3)), {kZero, kZero, kZero, kOne});
  EXPECT_EQ(inner(make_z_state(Symbol(2)), make_z_state(Symbol(2))), kOne);
  EXPECT_THROW(Symbol(4), std::domain_error);
  EXPECT_THROW(Symbol(-1), std::domain_error);
}

TEST(States, MakeXState) {
  // (1/2) Σ_j i^{jk} |j⟩, evaluated by hand for k = 0, 1, 2.
  expect_state_near(make_x_state(Symbol(0)), {0.5, 0.5, 0.5, 0.5});
  expect_state_near(make_x_state(Symbol(1)),
                    {cx{0.5, 0.0}, cx{0.0, 0.5}, cx{-0.5, 0.0}, cx{0.0, -0.5}});
  expect_state_near(make_x_state(Symbol(2)), {0.5, -0.5, 0.5, -0.5});
  for (int k = 0; k < 4; ++k)
    EXPECT_TRUE(make_x_state(Symbol(k)).is_normalized());
}

TEST(States, MutuallyUnbiasedBases) {
  // |⟨X_k|j⟩|² = 1/4 for every pair.
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j)
      EXPECT_NEAR(std::norm(inner(make_x_state(Symbol(k)), make_z_state(Symbol(j)))),
                  0.25, 1e-15);
}

TEST(States, RejectsNonFiniteAmplitudes) {
  EXPECT_THROW(StateVec(2, {cx{std::nan(""), 0.0}, kZero}), std::domain_error);
  EXPECT_THROW(StateVec(2, {kOne}), std::domain_error);
}

// ---------- apply ----------

TEST(Apply, IdentityAndPhaseFlip) {
  RandomStream rng(11);
  const StateVec psi = random_state(4, rng);
  expect_states_near(apply(UnitaryOp::identity(4), psi), psi);

  // I − 2|1⟩⟨1| flips the |1⟩ phase and leaves |0⟩ alone.
  const UnitaryOp u1(4, {kOne, kZero, kZero, kZero,  //
                         kZero, -kOne, kZero, kZero, //
                         kZero, kZero, kOne, kZero,  //
                         kZero, kZero, kZero, kOne});
  expect_state_near(apply(u1, make_z_state(Symbol(1))), {kZero, -kOne, kZero, kZero});
  expect_state_near(apply(u1, make_z_state(Symbol(0))), {kOne, kZero, kZero, kZero});

  EXPECT_THROW(apply(UnitaryOp::identity(16), psi), std::domain_error);
}

TEST(Apply, RandomUnitaryPreservesNorm) {
  RandomStream rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = trial % 2 == 0 ? 4 : 16;
    const UnitaryOp u = random_unitary(dim, rng);
    ASSERT_TRUE(u.is_unitary());
    const StateVec psi = random_state(dim, rng);
    EXPECT_NEAR(apply(u, psi).norm_sq(), 1.0, 1e-12);
  }
}

TEST(Apply, UnitarityValidatorRejectsNonUnitary) {
  const UnitaryOp not_unitary(2, {kOne, kOne, kZero, kOne});
  EXPECT_FALSE(not_unitary.is_unitary());
  EXPECT_TRUE(UnitaryOp::identity(7).is_unitary());
}

// ---------- measurement ----------

TEST(Measure, EigenstatesAreDeterministic) {
  RandomStream rng(1);
  for (int rep = 0; rep < 32; ++rep) {
    EXPECT_EQ(measure(make_z_state(Symbol(2)), Basis::Z, rng).outcome, Symbol(2));
    EXPECT_EQ(measure(make_x_state(Symbol(1)), Basis::X, rng).outcome, Symbol(1));
  }
  const Measurement m = measure(make_z_state(Symbol(2)), Basis::Z, rng);
  expect_states_near(m.collapsed, make_z_state(Symbol(2)));
}

TEST(Measure, BornFrequenciesWithinFourSigma) {
  // |0⟩ measured in X: brute-force inner products give 1/4 per outcome.
  const StateVec zero = make_z_state(Symbol(0));
  for (int k = 0; k < 4; ++k)
    ASSERT_NEAR(std::norm(inner(make_x_state(Symbol(k)), zero)), 0.25, 1e-15);

  RandomStream rng(17);
  const int n = 100000;
  std::array<int, 4> counts{};
  for (int i = 0; i < n; ++i)
    ++counts[measure(zero, Basis::X, rng).outcome.value()];
  const double sigma = std::sqrt(0.25 * 0.75 / n);
  for (int k = 0; k < 4; ++k)
    EXPECT_NEAR(counts[k] / double(n), 0.25, 4.0 * sigma) << "k=" << k;
}

TEST(Measure, BornFrequenciesForRandomState) {
  RandomStream rng(23);
  const StateVec psi = random_state(4, rng);
  const int n = 100000;
  std::array<int, 4> counts{};
  for (int i = 0; i < n; ++i) ++counts[measure(psi, Basis::Z, rng).outcome.value()];
  for (int k = 0; k < 4; ++k) {
    const double p = std::norm(psi[k]);
    const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-12) / n);
    EXPECT_NEAR(counts[k] / double(n), p, 4.0 * sigma) << "k=" << k;
  }
}

TEST(Measure, BasisCompleteness) {
  RandomStream rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const StateVec psi = random_state(4, rng);
    for (Basis b : {Basis::Z, Basis::X}) {
      double total = 0.0;
      for (int k = 0; k < 4; ++k)
        total += std::norm(inner(basis_vector(b, Symbol(k)), psi));
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Measure, RejectsBadInput) {
  RandomStream rng(2);
  EXPECT_THROW(measure(StateVec(16, std::vector<cx>(16, kZero)), Basis::Z, rng),
               std::domain_error);
  EXPECT_THROW(measure(StateVec(4, {kOne, kOne, kZero, kZero}), Basis::Z, rng),
               std::domain_error);
}

// ---------- phase comparison ----------

TEST(GlobalPhase, ExplicitPhases) {
  const PhaseMatch a = equal_up_to_global_phase(
      StateVec(4, {kZero, kI, kZero, kZero}), make_z_state(Symbol(1)), 1e-12);
  EXPECT_TRUE(a.equal);
  EXPECT_NEAR(std::abs(a.phase - kI), 0.0, 1e-12);

  EXPECT_FALSE(equal_up_to_global_phase(make_z_state(Symbol(0)),
                                        make_z_state(Symbol(1)), 1e-12).equal);

  StateVec neg_x0(4, {-0.5, -0.5, -0.5, -0.5});
  const PhaseMatch c = equal_up_to_global_phase(neg_x0, make_x_state(Symbol(0)), 1e-12);
  EXPECT_TRUE(c.equal);
  EXPECT_NEAR(std::abs(c.phase - cx{-1.0, 0.0}), 0.0, 1e-12);
}

TEST(GlobalPhase, ZeroVectorIsDomainError) {
  const StateVec zero(4, std::vector<cx>(4, kZero));
  EXPECT_THROW(equal_up_to_global_phase(zero, make_z_state(Symbol(0)), 1e-12),
               std::domain_error);
  EXPECT_THROW(equal_up_to_global_phase(make_z_state(Symbol(0)), zero, 1e-12),
               std::domain_error);
}

TEST(GlobalPhase, IsAnEquivalenceRelation) {
  RandomStream rng(31);
  const double tol = 1e-9;
  for (int trial = 0; trial < 25; ++trial) {
    const StateVec psi = random_state(4, rng);

    // reflexive
    EXPECT_TRUE(equal_up_to_global_phase(psi, psi, tol).equal);

    // symmetric: φ = e^{iθ}ψ
    const double theta = rng.next_double() * 6.283185307179586;
    const cx phase{std::cos(theta), std::sin(theta)};
    std::vector<cx> rotated(psi.amps());
    for (cx& a : rotated) a *= phase;
    const StateVec phi(4, std::move(rotated));
    EXPECT_TRUE(equal_up_to_global_phase(psi, phi, tol).equal);
    EXPECT_TRUE(equal_up_to_global_phase(phi, psi, tol).equal);

    // transitive: χ = e^{iθ'}φ
    const double theta2 = rng.next_double() * 6.283185307179586;
    const cx phase2{std::cos(theta2), std::sin(theta2)};
    std::vector<cx> rotated2(phi.amps());
    for (cx& a : rotated2) a *= phase2;
    const StateVec chi(4, std::move(rotated2));
    EXPECT_TRUE(equal_up_to_global_phase(phi, chi, tol).equal);
    EXPECT_TRUE(equal_up_to_global_phase(psi, chi, tol).equal);

    // distinct random states essentially never match
    const StateVec other = random_state(4, rng);
    EXPECT_FALSE(equal_up_to_global_phase(psi, other, tol).equal);
  }
}

// ---------- fidelity ----------

TEST(Fidelity, KnownOverlaps) {
  RandomStream rng(37);
  const StateVec psi = random_state(4, rng);
  EXPECT_NEAR(fidelity(psi, psi), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(make_z_state(Symbol(0)), make_z_state(Symbol(1))), 0.0, 1e-15);
  EXPECT_NEAR(fidelity(make_x_state(Symbol(0)), make_z_state(Symbol(0))), 0.25, 1e-15);
  EXPECT_THROW(fidelity(psi, random_state(16, rng)), std::domain_error);
}

// ---------- tensor / composite ----------

TEST(Tensor, IndexOrderIsCarrierMajor) {
  const StateVec t00 = tensor(make_z_state(Symbol(0)), make_z_state(Symbol(0)));
  ASSERT_EQ(t00.dim(), 16);
  EXPECT_EQ(t00[0], kOne);

  const StateVec t10 = tensor(make_z_state(Symbol(1)), make_z_state(Symbol(0)));
  EXPECT_EQ(t10[4], kOne);

  const StateVec tx = tensor(make_x_state(Symbol(0)), make_z_state(Symbol(0)));
  for (int i = 0; i < 16; ++i)
    EXPECT_NEAR(tx[i].real(), i % 4 == 0 ? 0.5 : 0.0, 1e-15) << "i=" << i;
}

TEST(Tensor, OperatorTensorMatchesStateTensor) {
  RandomStream rng(41);
  const UnitaryOp u = random_unitary(4, rng);
  const UnitaryOp w = random_unitary(4, rng);
  const StateVec a = random_state(4, rng);
  const StateVec b = random_state(4, rng);
  expect_states_near(apply(tensor(u, w), tensor(a, b)), tensor(apply(u, a), apply(w, b)),
                     1e-12);
  // U ⊗ I acting on the carrier factor only
  expect_states_near(apply_to_carrier(u, tensor(a, b)), tensor(apply(u, a), b), 1e-12);
}

TEST(MeasureSubsystem, ProductStates) {
  RandomStream rng(43);
  const StateVec psi = tensor(make_z_state(Symbol(2)), make_z_state(Symbol(3)));
  const SubsystemMeasurement m = measure_subsystem(psi, Basis::Z, rng);
  EXPECT_EQ(m.outcome, Symbol(2));
  expect_states_near(m.ancilla, make_z_state(Symbol(3)));

  const StateVec x10 = tensor(make_x_state(Symbol(1)), make_z_state(Symbol(0)));
  for (int rep = 0; rep < 16; ++rep) {
    const SubsystemMeasurement mx = measure_subsystem(x10, Basis::X, rng);
    EXPECT_EQ(mx.outcome, Symbol(1));
    expect_states_near(mx.ancilla, make_z_state(Symbol(0)));
  }
}

TEST(MeasureSubsystem, MaximallyCorrelatedState) {
  // (1/2) Σ_j |j⟩|j⟩: uniform outcomes, ancilla collapses to |outcome⟩.
  std::vector<cx> amps(16, kZero);
  for (int j = 0; j < 4; ++j) amps[j * 4 + j] = cx{0.5, 0.0};
  const StateVec correlated(16, std::move(amps));

  RandomStream rng(47);
  const int n = 40000;
  std::array<int, 4> counts{};
  for (int i = 0; i < n; ++i) {
    const SubsystemMeasurement m = measure_subsystem(correlated, Basis::Z, rng);
    ++counts[m.outcome.value()];
    expect_states_near(m.ancilla, make_z_state(m.outcome));
  }
  const double sigma = std::sqrt(0.25 * 0.75 / n);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(counts[k] / double(n), 0.25, 4.0 * sigma);
}

TEST(MeasureSubsystem, MarginalMatchesReducedDensityDiagonal) {
  RandomStream rng(53);
  const StateVec psi = random_state(16, rng);
  // Reduced-density diagonal in Z: p_c = Σ_a |Ψ[4c+a]|²
  std::array<double, 4> p{};
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a) p[c] += std::norm(psi[c * 4 + a]);

  const int n = 100000;
  std::array<int, 4> counts{};
  for (int i = 0; i < n; ++i)
    ++counts[measure_subsystem(psi, Basis::Z, rng).outcome.value()];
  for (int c = 0; c < 4; ++c) {
    const double sigma = std::sqrt(std::max(p[c] * (1.0 - p[c]), 1e-12) / n);
    EXPECT_NEAR(counts[c] / double(n), p[c], 4.0 * sigma) << "c=" << c;
  }
}
