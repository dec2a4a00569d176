#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "memcell/channel.hpp"
#include "memcell/errors.hpp"
#include "memcell/fixpoint.hpp"
#include "memcell/linalg.hpp"

using namespace memcell;

namespace {

Matrix ket_bra(Index dim, Index i, Index j) {
  Matrix m = Matrix::Zero(dim, dim);
  m(i, j) = 1.0;
  return m;
}

}  // namespace

TEST(Linalg, VecIsColumnStacking) {
  Matrix x(2, 2);
  x << 1.0, 2.0, 3.0, 4.0;
  const Vector v = linalg::vec(x);
  EXPECT_EQ(v(1), Complex(3.0));
  EXPECT_EQ(v(2), Complex(2.0));
  EXPECT_TRUE(linalg::unvec(v, 2).isApprox(x));
}

TEST(Linalg, PartialTransposeOfBellState) {
  Vector psi = Vector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  const Matrix pt = linalg::partial_transpose(psi * psi.adjoint(), 2, 2);
  EXPECT_NEAR(linalg::min_eigenvalue(pt), -0.5, 1e-12);
}

TEST(Linalg, PartialTraceOfProduct) {
  std::mt19937_64 rng(3);
  const Matrix a = linalg::random_density(2, rng);
  const Matrix b = linalg::random_density(3, rng);
  EXPECT_LT((linalg::partial_trace_second(linalg::kron(a, b), 2, 3) - a).norm(), 1e-12);
}

TEST(Linalg, FidelityOfEqualStatesIsOne) {
  std::mt19937_64 rng(4);
  const Matrix a = linalg::random_density(3, rng);
  EXPECT_NEAR(linalg::fidelity(a, a), 1.0, 1e-10);
  Matrix p0 = ket_bra(2, 0, 0);
  Matrix p1 = ket_bra(2, 1, 1);
  EXPECT_NEAR(linalg::fidelity(p0, p1), 0.0, 1e-12);
}

TEST(Linalg, HermitianBasisSpansHermitianParts) {
  const std::vector<Matrix> ops = {ket_bra(2, 0, 1), ket_bra(2, 1, 0)};
  const auto basis = linalg::hermitian_basis(ops);
  ASSERT_EQ(basis.size(), 2u);
  for (const auto& b : basis) EXPECT_LT((b - b.adjoint()).norm(), 1e-12);
}

TEST(Channel, ValidateIdentity) {
  const std::vector<Matrix> k = {Matrix::Identity(2, 2)};
  const auto r = validate_cptp(k);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.residual, 0.0);
}

TEST(Channel, ValidateFlipDephaseCell) {
  EXPECT_TRUE(validate_cptp(cells::flip_dephase().kraus()).pass);
}

TEST(Channel, DroppedKrausTermFails) {
  const std::vector<Matrix> k = {ket_bra(2, 0, 1)};
  const auto r = validate_cptp(k);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.residual, 1.0, 1e-12);
  EXPECT_THROW(QuantumChannel::from_kraus(k), DomainError);
}

TEST(Channel, RejectsMismatchedShapes) {
  const std::vector<Matrix> k = {Matrix::Identity(2, 2), Matrix::Zero(3, 3)};
  EXPECT_THROW(validate_cptp(k), DomainError);
  EXPECT_THROW(validate_cptp(std::vector<Matrix>{}), DomainError);
}

TEST(Channel, ApplyFlip) {
  const auto out = apply(cells::flip_dephase(), DensityOperator::pure(Vector::Unit(2, 0)));
  EXPECT_LT((out.matrix() - ket_bra(2, 1, 1)).norm(), 1e-14);
}

TEST(Channel, FullDampingSendsExcitedToGround) {
  const auto out = apply(cells::amplitude_damping(1.0), DensityOperator::pure(Vector::Unit(2, 1)));
  EXPECT_LT((out.matrix() - ket_bra(2, 0, 0)).norm(), 1e-14);
}

TEST(Channel, StationaryStateIsFixed) {
  const auto rho = DensityOperator::maximally_mixed(2);
  EXPECT_LT((apply(cells::flip_dephase(), rho).matrix() - rho.matrix()).norm(), 1e-14);
}

TEST(Channel, TensorOfIdentities) {
  const auto t = tensor(cells::identity(2), cells::identity(2));
  EXPECT_EQ(t.dim(), 4);
  EXPECT_LT(channel_distance(t, cells::identity(4)), 1e-12);
}

TEST(Channel, SquareOfFlipDephaseHasFourKraus) {
  const auto t = tensor(cells::flip_dephase(), cells::flip_dephase());
  EXPECT_EQ(t.dim(), 4);
  EXPECT_EQ(t.kraus().size(), 4u);
}

TEST(Channel, TensorWithIdentityKeepsShape) {
  const auto e = cells::phase_spectator(std::numbers::pi / 3);
  const auto s = shape(tensor(e, cells::identity(1)));
  EXPECT_EQ(s, shape(e));
}

TEST(Channel, AdjointOfUnitary) {
  std::mt19937_64 rng(5);
  const Matrix u = linalg::random_unitary(3, rng);
  const Matrix x = linalg::random_gaussian(3, 3, rng);
  const AdjointMap adj(cells::unitary(u));
  EXPECT_LT((adj(x) - u.adjoint() * x * u).norm(), 1e-12);
}

TEST(Channel, AdjointIsUnital) {
  const AdjointMap adj(cells::flip_dephase());
  EXPECT_LT((adj(Matrix::Identity(2, 2)) - Matrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(Channel, AdjointTransferMatrixIsConjugateTranspose) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 5; ++i) {
    std::vector<Matrix> k;
    const Matrix v = linalg::random_unitary(6, rng).leftCols(3);
    k.push_back(v.topRows(3));
    k.push_back(v.bottomRows(3));
    const auto c = QuantumChannel::from_kraus(k, 1e-8);
    const auto m = transfer_matrix(c).matrix;
    EXPECT_LT((transfer_matrix(adjoint(c)).matrix - m.adjoint()).norm(), 1e-12);
  }
}

TEST(Channel, TransferMatrixOfIdentity) {
  EXPECT_LT((transfer_matrix(cells::identity(2)).matrix - Matrix::Identity(4, 4)).norm(), 1e-14);
}

TEST(Channel, TransferMatrixEigenvaluesOfFlipDephase) {
  Eigen::ComplexEigenSolver<Matrix> es(transfer_matrix(cells::flip_dephase()).matrix);
  std::vector<double> re;
  for (Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(es.eigenvalues()(i).imag(), 0.0, 1e-12);
    re.push_back(es.eigenvalues()(i).real());
  }
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], -1.0, 1e-12);
  EXPECT_NEAR(re[1], 0.0, 1e-12);
  EXPECT_NEAR(re[2], 0.0, 1e-12);
  EXPECT_NEAR(re[3], 1.0, 1e-12);
}

TEST(Channel, ProductMapMatchesTensor) {
  std::mt19937_64 rng(8);
  const auto e = cells::amplitude_damping(0.3);
  const auto f = cells::phase_spectator(1.0);
  const ProductMap p({e, f});
  const auto t = tensor(e, f);
  const Matrix x = linalg::random_gaussian(6, 6, rng);
  EXPECT_LT((p.apply(x) - t(x)).norm(), 1e-12);
  EXPECT_LT((p.apply_adjoint(x) - AdjointMap(t)(x)).norm(), 1e-12);
}

TEST(Channel, CompressOntoInvariantBlock) {
  Matrix v = Matrix::Zero(3, 2);
  v(0, 0) = v(1, 1) = 1.0;
  const auto c = compress(cells::phase_spectator(0.7), v);
  EXPECT_EQ(c.dim(), 2);
  EXPECT_TRUE(validate_cptp(c.kraus()).pass);
}
