#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "memcell/channel.hpp"
#include "memcell/errors.hpp"
#include "memcell/fixpoint.hpp"
#include "memcell/linalg.hpp"
#include "memcell/oracle.hpp"

using namespace memcell;

namespace {

Shape make_shape(std::vector<Index> dims) { return Shape{std::move(dims)}; }

bool contains(const std::vector<SpectrumEntry>& entries, Complex value, std::size_t mult) {
  for (const auto& e : entries) {
    if (std::abs(e.value - value) <= 1e-7) return e.multiplicity == mult;
  }
  return false;
}

std::size_t total(const std::vector<SpectrumEntry>& entries) {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.multiplicity;
  return n;
}

}  // namespace

TEST(FixedPoints, IdentitySpansEverything) {
  EXPECT_EQ(fixed_point_space(cells::identity(2)).size(), 4u);
}

TEST(FixedPoints, FlipDephaseIsScalar) {
  const auto basis = fixed_point_space(cells::flip_dephase());
  ASSERT_EQ(basis.size(), 1u);
  const Matrix expected = Matrix::Identity(2, 2) / std::sqrt(2.0);
  EXPECT_LT(std::min((basis[0] - expected).norm(), (basis[0] + expected).norm()), 1e-10);
}

TEST(FixedPoints, PhaseSpectatorIsDiagonal) {
  const auto basis = fixed_point_space(cells::phase_spectator(1.1));
  ASSERT_EQ(basis.size(), 3u);
  for (const auto& b : basis) {
    const Matrix off = b - Matrix(b.diagonal().asDiagonal());
    EXPECT_LT(off.norm(), 1e-10);
  }
}

TEST(Structure, IdentityIsOneFullSector) {
  const auto dec = structure_decomposition(cells::identity(3));
  ASSERT_EQ(dec.sectors.size(), 1u);
  EXPECT_EQ(dec.sectors[0].d, 3);
  EXPECT_EQ(dec.sectors[0].m, 1);
  EXPECT_EQ(dec.shape(), make_shape({3}));
  EXPECT_LT(dec.decaying_projector.norm(), 1e-10);
}

TEST(Structure, PhaseSpectatorHasThreeLines) {
  const auto dec = structure_decomposition(cells::phase_spectator(std::numbers::pi / 3));
  ASSERT_EQ(dec.sectors.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    Matrix p = Matrix::Zero(3, 3);
    p(static_cast<Index>(k), static_cast<Index>(k)) = 1.0;
    EXPECT_LT((dec.sectors[k].projector() - p).norm(), 1e-10) << "sector " << k;
  }
}

TEST(Structure, EngineeredCellRecoversSigma) {
  const auto cell = oracle::engineered_qubit_cell();
  const auto dec = structure_decomposition(cell.channel);
  ASSERT_EQ(dec.sectors.size(), 1u);
  EXPECT_EQ(dec.sectors[0].d, 2);
  EXPECT_EQ(dec.sectors[0].m, 2);
  const auto r = oracle::compare_with_planted(cell, dec);
  EXPECT_TRUE(r.pass) << r.detail;
  // sigma itself is only defined up to a unitary on the second factor; its
  // spectrum is not.
  const auto planted = linalg::eigh(*cell.blocks[0].sigma).values;
  const auto found = linalg::eigh(dec.sectors[0].sigma.matrix()).values;
  EXPECT_LT((planted - found).norm(), 1e-9);
}

TEST(Structure, DecayingProjectorComplementsSectors) {
  const auto cell = oracle::engineered_qubit_cell();
  const auto dec = structure_decomposition(cell.channel);
  Matrix sum = dec.decaying_projector;
  for (const auto& s : dec.sectors) sum += s.projector();
  EXPECT_LT((sum - Matrix::Identity(5, 5)).norm(), 1e-9);
  EXPECT_NEAR(dec.decaying_projector.trace().real(), 1.0, 1e-9);
}

TEST(Structure, ReferenceStatesAreStationary) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    oracle::RandomChannelSpec spec{5, 2, seed, {{1, 2, {}}, {2, 1, {}}}};
    const auto c = oracle::random_channel(spec);
    const auto dec = structure_decomposition(c);
    for (const auto& s : dec.sectors) {
      EXPECT_LT((c(s.reference_state()) - s.reference_state()).norm(), 1e-8);
    }
  }
}

TEST(Structure, NoiselessFactorIsPreserved) {
  // Any operator X (x) sigma in a sector is mapped to U X U^dag (x) sigma; for
  // the engineered cell U = I.
  const auto cell = oracle::engineered_qubit_cell();
  const auto dec = structure_decomposition(cell.channel);
  const auto& s = dec.sectors[0];
  std::mt19937_64 rng(1);
  const Matrix x = linalg::random_gaussian(2, 2, rng);
  const Matrix in = s.embedding() * linalg::kron(x, s.sigma.matrix()) * s.embedding().adjoint();
  EXPECT_LT((cell.channel(in) - in).norm(), 1e-9);
}

TEST(Structure, SumOfSquaresMatchesOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = oracle::random_channel({2 + static_cast<Index>(seed % 3), 2, seed, {}});
    std::size_t n = 0;
    for (const auto& s : structure_decomposition(c).sectors) n += static_cast<std::size_t>(s.d * s.d);
    EXPECT_EQ(n, oracle::fix_dimension_oracle(c));
  }
}

TEST(Structure, SeedIsRecorded) {
  AnalysisOptions o;
  o.seed = 77;
  const auto dec = structure_decomposition(cells::identity(2), o);
  EXPECT_GE(dec.seed_used, 77u);
  EXPECT_GE(dec.attempts, 1);
}

TEST(Shape, ReferenceCells) {
  EXPECT_EQ(shape(cells::flip_dephase()), make_shape({1}));
  EXPECT_EQ(shape(tensor(cells::flip_dephase(), cells::flip_dephase())), make_shape({1, 1}));
  EXPECT_EQ(shape(cells::identity(2)), make_shape({2}));
  EXPECT_EQ(shape(cells::amplitude_damping(0.4)), make_shape({1}));
}

TEST(Shape, UnitaryPhaseCellPowers) {
  Matrix u = Matrix::Identity(2, 2);
  u(1, 1) = std::polar(1.0, std::numbers::pi / 3);
  const auto c = cells::unitary(u);
  EXPECT_EQ(shape(c), make_shape({1, 1}));
  EXPECT_EQ(shape(tensor(c, c)), make_shape({2, 1, 1}));
  EXPECT_EQ(shape(tensor_power(c, 3)), make_shape({3, 3, 1, 1}));
}

TEST(Shape, MaxAndLength) {
  const Shape s = make_shape({3, 1, 1});
  EXPECT_EQ(s.max(), 3);
  EXPECT_EQ(s.length(), 3u);
}

TEST(Classification, PhaseSpectator) {
  const auto s = classify_eigenvalues(cells::phase_spectator(std::numbers::pi / 3));
  ASSERT_TRUE(s.classification);
  ASSERT_EQ(s.classification->internal.size(), 3u);
  for (const auto& per : s.classification->internal) {
    ASSERT_EQ(per.size(), 1u);
    EXPECT_TRUE(contains(per, 1.0, 1));
  }
  const auto& ext = s.classification->external;
  EXPECT_EQ(total(ext), 2u);
  EXPECT_TRUE(contains(ext, std::polar(1.0, std::numbers::pi / 3), 1));
  EXPECT_TRUE(contains(ext, std::polar(1.0, -std::numbers::pi / 3), 1));
}

TEST(Classification, FlipDephaseIsAllInternal) {
  const auto s = classify_eigenvalues(cells::flip_dephase());
  ASSERT_TRUE(s.classification);
  EXPECT_TRUE(s.classification->external.empty());
  ASSERT_EQ(s.classification->internal.size(), 1u);
  EXPECT_TRUE(contains(s.classification->internal[0], 1.0, 1));
  EXPECT_TRUE(contains(s.classification->internal[0], -1.0, 1));
}

TEST(Classification, IdentityIsAllInternal) {
  const auto s = classify_eigenvalues(cells::identity(2));
  EXPECT_TRUE(s.classification->external.empty());
  EXPECT_EQ(total(s.classification->internal[0]), 4u);
}

TEST(Classification, InternalPlusExternalIsEverything) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto c = oracle::random_channel({4, 2, seed, {{1, 1, {}}, {1, 2, {}}}});
    const auto s = classify_eigenvalues(c);
    std::size_t n = total(s.classification->external);
    for (const auto& per : s.classification->internal) n += total(per);
    EXPECT_EQ(n, s.size());
  }
}

TEST(Analyze, NullCellCarriesCyclicStates) {
  const auto a = analyze(cells::shift_dephase(3));
  ASSERT_TRUE(a.cyclic);
  EXPECT_EQ(a.cyclic->period, 3u);
  EXPECT_FALSE(analyze(cells::identity(2)).cyclic);
}

TEST(Structure, SeedDoesNotChangeSectors) {
  const auto c = oracle::random_channel({5, 2, 31, {{2, 1, {}}, {1, 2, {}}}});
  AnalysisOptions a;
  AnalysisOptions b;
  b.seed = 99;
  const auto da = structure_decomposition(c, a);
  const auto db = structure_decomposition(c, b);
  ASSERT_EQ(da.sectors.size(), db.sectors.size());
  for (std::size_t k = 0; k < da.sectors.size(); ++k) {
    EXPECT_EQ(da.sectors[k].d, db.sectors[k].d);
    EXPECT_EQ(da.sectors[k].m, db.sectors[k].m);
    EXPECT_LT((da.sectors[k].projector() - db.sectors[k].projector()).norm(), 1e-7);
  }
}

TEST(Structure, NullCellIffOneDimensionalFix) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto c = seed % 2 ? oracle::random_channel({3, 2, seed, {}})
                            : oracle::random_channel({3, 2, seed, {{1, 1, {}}, {1, 1, {}}}});
    EXPECT_EQ(shape(c) == Shape{{1}}, fixed_point_space(c).size() == 1u);
  }
}
