#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "memcell/channel.hpp"
#include "memcell/errors.hpp"
#include "memcell/fixpoint.hpp"
#include "memcell/linalg.hpp"
#include "memcell/oracle.hpp"
#include "memcell/superactivation.hpp"

using namespace memcell;

namespace {

QuantumChannel phase_unitary(double theta) {
  Matrix u = Matrix::Identity(2, 2);
  u(1, 1) = std::polar(1.0, theta);
  return cells::unitary(u);
}

}  // namespace

TEST(Ppt, BellStateIsNpt) {
  Vector psi = Vector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  const auto c = ppt_check(DensityOperator::pure(psi), 2, 2);
  EXPECT_NEAR(c.min_pt_eigenvalue, -0.5, 1e-12);
  EXPECT_TRUE(c.entangled);
  EXPECT_EQ(c.verdict, "NPT");
}

TEST(Ppt, ProductStateIsPpt) {
  std::mt19937_64 rng(2);
  const Matrix a = linalg::random_density(2, rng);
  const Matrix b = linalg::random_density(3, rng);
  const auto c = ppt_check(DensityOperator::from_matrix(linalg::kron(a, b)), 2, 3);
  EXPECT_GE(c.min_pt_eigenvalue, -1e-12);
  EXPECT_FALSE(c.entangled);
  EXPECT_EQ(c.verdict, "PPT (separable)");
  const auto big = ppt_check(DensityOperator::maximally_mixed(9), 3, 3);
  EXPECT_EQ(big.verdict, "PPT (undecided)");
}

TEST(Quantum, EqualPhasesSuperactivate) {
  const auto e = cells::phase_spectator(std::numbers::pi / 3);
  const auto v = check_quantum_superactivation(e, e);
  ASSERT_TRUE(v.applicable);
  ASSERT_TRUE(v.superactivates);
  ASSERT_TRUE(v.pair);
  EXPECT_LT(std::abs(v.pair->a * v.pair->b - 1.0), 1e-7);
  EXPECT_TRUE(v.pair->a_external);
  EXPECT_TRUE(v.pair->b_external);
}

TEST(Quantum, UnequalPhasesDoNot) {
  const auto v = check_quantum_superactivation(cells::phase_spectator(std::numbers::pi / 3),
                                               cells::phase_spectator(std::numbers::pi / 2));
  EXPECT_TRUE(v.applicable);
  EXPECT_FALSE(v.superactivates);
  EXPECT_FALSE(v.pair);
}

TEST(Quantum, ReflectedPhaseSuperactivates) {
  const double th = 2.0;
  const auto v = check_quantum_superactivation(cells::phase_spectator(th),
                                               cells::phase_spectator(2 * std::numbers::pi - th));
  EXPECT_TRUE(v.superactivates);
}

TEST(Quantum, NullCellsDoNot) {
  EXPECT_FALSE(check_quantum_superactivation(cells::flip_dephase(), cells::flip_dephase()).superactivates);
  EXPECT_FALSE(check_quantum_superactivation(cells::amplitude_damping(0.5), cells::amplitude_damping(0.5))
                   .superactivates);
  EXPECT_FALSE(check_self_superactivation(cells::shift_dephase(3)));
}

TEST(Quantum, QubitMemoryIsNotApplicable) {
  const auto v = check_quantum_superactivation(cells::identity(2), cells::flip_dephase());
  EXPECT_FALSE(v.applicable);
  EXPECT_FALSE(v.superactivates);
}

TEST(Quantum, SelfSuperactivationForAnyPhase) {
  for (double th : {0.3, 1.0, std::numbers::pi / 2, 2.5, 4.0, 6.0}) {
    EXPECT_TRUE(check_self_superactivation(cells::phase_spectator(th))) << th;
  }
}

TEST(Witness, PhaseSpectatorIsStationaryAndNpt) {
  const auto e = cells::phase_spectator(std::numbers::pi / 3);
  const auto a = analyze(e);
  const auto v = check_quantum_superactivation(a, a);
  ASSERT_TRUE(v.pair);
  const auto w = construct_entangled_stationary(e, a, e, a, *v.pair);
  EXPECT_EQ(w.state.dim(), 9);
  EXPECT_LT(w.stationarity_residual, 1e-8);
  EXPECT_LT(w.certificate.min_pt_eigenvalue, -1e-6);
  EXPECT_GT(w.epsilon, 0.0);
  const auto direct = tensor(e, e);
  EXPECT_LT((direct(w.state.matrix()) - w.state.matrix()).norm(), 1e-8);
}

TEST(Witness, ConjugateUnitariesGiveBellLikeState) {
  const auto e = phase_unitary(std::numbers::pi / 4);
  const auto f = phase_unitary(-std::numbers::pi / 4);
  const auto ea = analyze(e);
  const auto fa = analyze(f);
  const auto v = check_quantum_superactivation(ea, fa);
  ASSERT_TRUE(v.superactivates);
  const auto w = construct_entangled_stationary(e, ea, f, fa, *v.pair);
  EXPECT_TRUE(w.certificate.entangled);
  EXPECT_EQ(w.certificate.verdict, "NPT");
  // Coherence between |00> and |11>.
  EXPECT_GT(std::abs(w.state.matrix()(0, 3)), 1e-3);
}

TEST(Witness, InternalOnlyValueHasNoOffDiagonalBlock) {
  const auto e = cells::flip_dephase();
  const auto a = analyze(e);
  const MatchedPair pair{-1.0, -1.0, false, false};
  EXPECT_THROW(construct_entangled_stationary(e, a, e, a, pair), DomainError);
}

// One value internal, the other external: e (x) f does store a qubit, but
// every stationary state of the product is block diagonal in the first
// factor's basis and hence separable. The verdict is true, the witness
// builder refuses.
TEST(Witness, MixedInternalExternalPairHasNoEntangledWitness) {
  const auto e = cells::flip_dephase();  // -1 internal
  Matrix z = Matrix::Identity(2, 2);
  z(1, 1) = -1.0;
  const auto f = cells::unitary(z);  // -1 external
  EXPECT_EQ(product_decomposition(e, f).shape(), Shape{{2}});
  const auto ea = analyze(e);
  const auto fa = analyze(f);
  const auto v = check_quantum_superactivation(ea, fa);
  ASSERT_TRUE(v.superactivates);
  EXPECT_FALSE(v.pair->a_external);
  EXPECT_TRUE(v.pair->b_external);
  EXPECT_THROW(construct_entangled_stationary(e, ea, f, fa, *v.pair), DomainError);
  const auto r = superactivation_report(e, f, 1);
  EXPECT_FALSE(r.witness);
  EXPECT_FALSE(r.witness_error.empty());
}

TEST(Classical, FlipDephaseSquared) {
  const auto e = cells::flip_dephase();
  const auto states = construct_classical_superactivation(e, e);
  ASSERT_EQ(states.size(), 2u);
  const auto t = tensor(e, e);
  for (std::size_t i = 0; i < states.size(); ++i) {
    EXPECT_LT((t(states[i].state.matrix()) - states[i].state.matrix()).norm(), 1e-10);
    EXPECT_FALSE(ppt_check(states[i].state, 2, 2).entangled);
    Matrix rebuilt = Matrix::Zero(4, 4);
    for (const auto& term : states[i].terms) {
      rebuilt += term.weight * linalg::kron(term.factors[0], term.factors[1]);
    }
    EXPECT_LT((rebuilt - states[i].state.matrix()).norm(), 1e-12);
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      EXPECT_LT(std::abs((states[i].state.matrix() * states[j].state.matrix()).trace()), 1e-10);
    }
  }
}

TEST(Classical, GcdCounts) {
  EXPECT_EQ(construct_classical_superactivation(cells::shift_dephase(2), cells::shift_dephase(3)).size(), 1u);
  EXPECT_EQ(construct_classical_superactivation(cells::shift_dephase(2), cells::shift_dephase(4)).size(), 2u);
  EXPECT_EQ(oracle::fix_dimension_oracle(tensor(cells::shift_dephase(2), cells::shift_dephase(4))), 2u);
  EXPECT_EQ(construct_classical_superactivation(cells::shift_dephase(4), cells::shift_dephase(6)).size(), 2u);
}

TEST(Classical, RequiresNullCells) {
  EXPECT_THROW(construct_classical_superactivation(cells::identity(2), cells::flip_dephase()), DomainError);
}

TEST(Classical, TensorPowerStates) {
  const auto e = cells::shift_dephase(2);
  for (int t = 1; t <= 3; ++t) {
    const auto states = tensor_power_stationary_states(e, t);
    EXPECT_EQ(states.size(), std::size_t{1} << (t - 1));
    const auto pt = tensor_power(e, t);
    for (const auto& s : states) {
      EXPECT_LT((pt(s.state.matrix()) - s.state.matrix()).norm(), 1e-10);
    }
  }
}

TEST(Growth, ShiftCellHasNoQubits) {
  const auto g = tensor_power_analysis(cells::shift_dephase(2), 3);
  ASSERT_EQ(g.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(g.rows[i].length, std::size_t{1} << i);
    EXPECT_EQ(g.rows[i].max, 1);
  }
}

TEST(Growth, AmplitudeDampingStaysTrivial) {
  const auto g = tensor_power_analysis(cells::amplitude_damping(0.5), 3);
  for (const auto& r : g.rows) {
    EXPECT_EQ(r.length, 1u);
    EXPECT_EQ(r.max, 1);
    EXPECT_EQ(r.fix_dimension, 1u);
  }
}

TEST(Growth, PhaseCellFollowsCentralBinomial) {
  const auto g = tensor_power_analysis(phase_unitary(std::numbers::pi / 3), 4);
  ASSERT_EQ(g.rows.size(), 4u);
  const Index expected[] = {1, 2, 3, 6};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(g.rows[i].max, expected[i]);
}

TEST(Growth, BudgetTruncates) {
  GrowthBudget b;
  b.max_dim = 9;
  const auto g = tensor_power_analysis(cells::phase_spectator(1.0), 4, {}, b);
  EXPECT_EQ(g.rows.size(), 2u);
  EXPECT_TRUE(g.truncated);
  EXPECT_FALSE(g.truncation_reason.empty());
}

TEST(Report, FlipDephaseSelf) {
  const auto e = cells::flip_dephase();
  const auto r = superactivation_report(e, e, 2);
  EXPECT_TRUE(r.classical_applicable);
  EXPECT_TRUE(r.classical_verdict);
  EXPECT_EQ(r.classical_m, 2u);
  EXPECT_FALSE(r.quantum.superactivates);
  EXPECT_FALSE(r.witness);
}

TEST(Report, AmplitudeDampingSelf) {
  const auto e = cells::amplitude_damping(0.5);
  const auto r = superactivation_report(e, e, 2);
  EXPECT_FALSE(r.classical_verdict);
  EXPECT_FALSE(r.quantum.superactivates);
}

TEST(Report, PhaseSpectatorSelf) {
  const auto e = cells::phase_spectator(std::numbers::pi / 3);
  const auto r = superactivation_report(e, e, 2);
  EXPECT_FALSE(r.classical_applicable);
  EXPECT_TRUE(r.quantum.superactivates);
  ASSERT_TRUE(r.witness);
  EXPECT_TRUE(r.witness->certificate.entangled);
  EXPECT_EQ(r.shape_product.max(), 2);
}
