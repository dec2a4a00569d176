#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "memcell/channel.hpp"
#include "memcell/errors.hpp"
#include "memcell/linalg.hpp"
#include "memcell/oracle.hpp"
#include "memcell/spectral.hpp"

using namespace memcell;

namespace {

Matrix projector(Index dim, Index i) {
  Matrix m = Matrix::Zero(dim, dim);
  m(i, i) = 1.0;
  return m;
}

bool contains(const std::vector<SpectrumEntry>& entries, Complex value, std::size_t mult, double tol = 1e-9) {
  for (const auto& e : entries) {
    if (std::abs(e.value - value) <= tol) return e.multiplicity == mult;
  }
  return false;
}

}  // namespace

TEST(Spectral, IdentityHasFourfoldOne) {
  const auto s = peripheral_spectrum(cells::identity(2));
  ASSERT_EQ(s.eigenvalues.size(), 1u);
  EXPECT_EQ(s.size(), 4u);
  EXPECT_TRUE(contains(s.entries(), 1.0, 4));
}

TEST(Spectral, FlipDephaseIsPlusMinusOne) {
  const auto s = peripheral_spectrum(cells::flip_dephase());
  EXPECT_EQ(s.size(), 2u);
  EXPECT_TRUE(contains(s.entries(), 1.0, 1));
  EXPECT_TRUE(contains(s.entries(), -1.0, 1));
}

TEST(Spectral, PhaseSpectatorValues) {
  const double th = std::numbers::pi / 3;
  const auto s = peripheral_spectrum(cells::phase_spectator(th));
  EXPECT_EQ(s.size(), 5u);
  EXPECT_TRUE(contains(s.entries(), 1.0, 3));
  EXPECT_TRUE(contains(s.entries(), std::polar(1.0, th), 1));
  EXPECT_TRUE(contains(s.entries(), std::polar(1.0, -th), 1));
}

TEST(Spectral, EntriesSortedByPhase) {
  const auto s = peripheral_spectrum(cells::shift_dephase(4));
  ASSERT_EQ(s.eigenvalues.size(), 4u);
  for (std::size_t i = 1; i < s.eigenvalues.size(); ++i) {
    EXPECT_LT(linalg::phase(s.eigenvalues[i - 1].value), linalg::phase(s.eigenvalues[i].value));
  }
}

TEST(Spectral, DualsAreBiorthogonal) {
  const auto s = peripheral_spectrum(oracle::random_channel({4, 1, 11, {}}));
  for (const auto& c : s.eigenvalues) {
    for (std::size_t i = 0; i < c.multiplicity; ++i) {
      for (std::size_t j = 0; j < c.multiplicity; ++j) {
        const Complex ip = (c.dual_operators[i].adjoint() * c.eigen_operators[j]).trace();
        EXPECT_NEAR(std::abs(ip - (i == j ? 1.0 : 0.0)), 0.0, 1e-9);
      }
    }
  }
}

TEST(Spectral, PhaseProjectionOfIdentityIsIdentity) {
  const auto phi = phase_projection(cells::identity(3));
  EXPECT_LT((phi.matrix - Matrix::Identity(9, 9)).norm(), 1e-10);
}

// Every eigenvalue of a unitary cell is peripheral: the projections sum to the
// identity, and weighting them by their eigenvalues gives back the map.
TEST(Spectral, PhaseProjectionOfUnitaryIsTheMap) {
  std::mt19937_64 rng(1);
  const Matrix u = linalg::random_unitary(3, rng);
  const auto c = cells::unitary(u);
  const auto spectrum = peripheral_spectrum(c);
  EXPECT_LT((phase_projection(spectrum).matrix - Matrix::Identity(9, 9)).norm(), 1e-9);
  Matrix weighted = Matrix::Zero(9, 9);
  for (const auto& cluster : spectrum.eigenvalues) weighted += cluster.value * spectral_projector(cluster, 3).matrix;
  EXPECT_LT((weighted - transfer_matrix(c).matrix).norm(), 1e-9);
}

TEST(Spectral, PhaseProjectionOfDampingMatchesPowerIteration) {
  const auto c = cells::amplitude_damping(0.5);
  const auto phi = phase_projection(c);
  const auto far = power(transfer_matrix(c), 200);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 5; ++i) {
    const Matrix rho = linalg::random_density(2, rng);
    EXPECT_LT((phi.apply(rho) - projector(2, 0)).norm(), 1e-10);
    EXPECT_LT((far.apply(rho) - projector(2, 0)).norm(), 1e-10);
  }
}

TEST(Spectral, PhaseProjectionOfFlipDephaseMatchesEvenPowers) {
  const auto c = cells::flip_dephase();
  const auto phi = phase_projection(c);
  // M^2 already equals E_phi: populations survive, coherences vanish.
  const auto m2 = power(transfer_matrix(c), 2);
  EXPECT_LT((phi.matrix - m2.matrix).norm(), 1e-10);
  Matrix x(2, 2);
  x << 0.3, 0.4, 0.5, 0.7;
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 0.3;
  expected(1, 1) = 0.7;
  EXPECT_LT((phi.apply(x) - expected).norm(), 1e-12);
}

TEST(Spectral, PhaseProjectionIsIdempotentOnRandomChannels) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto phi = phase_projection(oracle::random_channel({3, 2, seed, {}}));
    EXPECT_LT((phi.matrix * phi.matrix - phi.matrix).norm(), 1e-8);
  }
}

TEST(Spectral, MaximalStationaryStates) {
  EXPECT_LT((maximal_stationary_state(cells::flip_dephase()).matrix() - Matrix::Identity(2, 2) / 2.0).norm(), 1e-12);
  EXPECT_LT((maximal_stationary_state(cells::amplitude_damping(0.5)).matrix() - projector(2, 0)).norm(), 1e-12);
  EXPECT_LT((maximal_stationary_state(cells::identity(3)).matrix() - Matrix::Identity(3, 3) / 3.0).norm(), 1e-12);
}

TEST(Spectral, Periods) {
  EXPECT_EQ(period(cells::flip_dephase()), 2u);
  EXPECT_EQ(period(cells::amplitude_damping(0.5)), 1u);
  EXPECT_EQ(period(cells::shift_dephase(3)), 3u);
  EXPECT_THROW(period(cells::identity(2)), DomainError);
}

TEST(Spectral, CyclicStatesOfFlipDephase) {
  const auto fam = cyclic_states(cells::flip_dephase());
  ASSERT_EQ(fam.period, 2u);
  EXPECT_LT((fam.states[0].matrix() - projector(2, 0)).norm(), 1e-10);
  EXPECT_LT((fam.states[1].matrix() - projector(2, 1)).norm(), 1e-10);
}

TEST(Spectral, CyclicStatesOfShift) {
  const auto c = cells::shift_dephase(3);
  const auto fam = cyclic_states(c);
  ASSERT_EQ(fam.period, 3u);
  for (Index i = 0; i < 3; ++i) {
    EXPECT_LT((fam.states[static_cast<std::size_t>(i)].matrix() - projector(3, i)).norm(), 1e-10);
  }
}

TEST(Spectral, CyclicFamilyProperties) {
  // A rotated period-3 cell with a decaying level.
  std::mt19937_64 rng(9);
  const Matrix w = linalg::random_unitary(4, rng);
  std::vector<Matrix> k;
  for (Index i = 0; i < 3; ++i) {
    Matrix a = Matrix::Zero(4, 4);
    a((i + 1) % 3, i) = 1.0;
    k.push_back(w * a * w.adjoint());
  }
  Matrix d0 = Matrix::Zero(4, 4);
  Matrix d1 = Matrix::Zero(4, 4);
  d0(0, 3) = std::sqrt(0.5);
  d1(2, 3) = std::sqrt(0.5);
  k.push_back(w * d0 * w.adjoint());
  k.push_back(w * d1 * w.adjoint());
  const auto c = QuantumChannel::from_kraus(k, 1e-10);

  const auto fam = cyclic_states(c);
  ASSERT_EQ(fam.period, 3u);
  Matrix mix = Matrix::Zero(4, 4);
  for (std::size_t i = 0; i < 3; ++i) {
    mix += fam.states[i].matrix() / 3.0;
    EXPECT_LT((c(fam.states[i].matrix()) - fam.states[(i + 1) % 3].matrix()).norm(), 1e-8);
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) EXPECT_LE(std::abs((fam.states[i].matrix() * fam.states[j].matrix()).trace()), 1e-9);
    }
  }
  EXPECT_LT((mix - maximal_stationary_state(c).matrix()).norm(), 1e-8);
}

TEST(Spectral, TrivialPeriodGivesStationaryState) {
  const auto fam = cyclic_states(cells::amplitude_damping(0.2));
  ASSERT_EQ(fam.period, 1u);
  EXPECT_LT((fam.states[0].matrix() - projector(2, 0)).norm(), 1e-10);
}

TEST(Spectral, TensorSpectrumMatchesDirectSolve) {
  const auto e = cells::phase_spectator(std::numbers::pi / 3);
  const auto f = cells::flip_dephase();
  const auto direct = peripheral_spectrum(tensor(e, f));
  const auto built = tensor_spectrum(peripheral_spectrum(e), peripheral_spectrum(f));
  ASSERT_EQ(direct.eigenvalues.size(), built.eigenvalues.size());
  for (std::size_t i = 0; i < direct.eigenvalues.size(); ++i) {
    EXPECT_LT(std::abs(direct.eigenvalues[i].value - built.eigenvalues[i].value), 1e-9);
    EXPECT_EQ(direct.eigenvalues[i].multiplicity, built.eigenvalues[i].multiplicity);
  }
}
