#include "memcell/channel.hpp"

#include <cmath>
#include <string>

#include "memcell/errors.hpp"
#include "memcell/linalg.hpp"

namespace memcell {

namespace {

constexpr const char* kModule = "channel";

Index common_dim(std::span<const Matrix> kraus) {
  if (kraus.empty()) throw DomainError(kModule, "a channel needs at least one Kraus operator");
  const Index d = kraus.front().rows();
  if (d == 0) throw DomainError(kModule, "Kraus operators must be non-empty");
  for (std::size_t i = 0; i < kraus.size(); ++i) {
    const auto& k = kraus[i];
    if (k.rows() != d || k.cols() != d) {
      throw DomainError(kModule, "Kraus operator " + std::to_string(i) + " is " +
                                     std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                                     ", expected " + std::to_string(d) + "x" + std::to_string(d));
    }
    if (!linalg::is_finite(k)) {
      throw DomainError(kModule, "Kraus operator " + std::to_string(i) + " has non-finite entries");
    }
  }
  return d;
}

}  // namespace

CptpReport validate_cptp(std::span<const Matrix> kraus, double tol) {
  const Index d = common_dim(kraus);
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& k : kraus) sum.noalias() += k.adjoint() * k;
  CptpReport report;
  report.dim = d;
  report.kraus_count = kraus.size();
  report.residual = (sum - Matrix::Identity(d, d)).norm();
  report.pass = report.residual <= tol;
  return report;
}

DensityOperator DensityOperator::from_matrix(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DomainError(kModule, "density operator must be a non-empty square matrix");
  }
  if (!linalg::is_finite(m)) throw DomainError(kModule, "density operator has non-finite entries");
  const double herm_err = (m - m.adjoint()).norm();
  if (herm_err > tol) {
    throw DomainError(kModule, "density operator is not Hermitian (residual " +
                                   std::to_string(herm_err) + ")");
  }
  Matrix h = linalg::hermitize(m);
  const double tr = h.trace().real();
  if (std::abs(tr - 1.0) > tol) {
    throw DomainError(kModule, "density operator trace is " + std::to_string(tr));
  }
  const double lo = linalg::min_eigenvalue(h);
  if (lo < -tol) {
    throw DomainError(kModule, "density operator has eigenvalue " + std::to_string(lo));
  }
  return DensityOperator(std::move(h));
}

DensityOperator DensityOperator::pure(const Vector& psi) {
  const double n = psi.norm();
  if (n == 0.0) throw DomainError(kModule, "pure state vector is zero");
  const Vector u = psi / n;
  return DensityOperator(linalg::hermitize(u * u.adjoint()));
}

DensityOperator DensityOperator::maximally_mixed(Index dim) {
  if (dim <= 0) throw DomainError(kModule, "dimension must be positive");
  return DensityOperator(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

QuantumChannel QuantumChannel::from_kraus(std::vector<Matrix> kraus, double tol) {
  const auto report = validate_cptp(kraus, tol);
  if (!report.pass) {
    throw DomainError(kModule, "Kraus operators are not trace preserving (residual " +
                                   std::to_string(report.residual) + ")");
  }
  return QuantumChannel(report.dim, std::move(kraus));
}

Matrix QuantumChannel::operator()(const Matrix& x) const {
  if (x.rows() != dim_ || x.cols() != dim_) {
    throw DomainError(kModule, "operator dimension " + std::to_string(x.rows()) +
                                   " does not match channel dimension " + std::to_string(dim_));
  }
  Matrix out = Matrix::Zero(dim_, dim_);
  for (const auto& k : kraus_) out.noalias() += k * x * k.adjoint();
  return out;
}

AdjointMap::AdjointMap(const QuantumChannel& channel) : dim_(channel.dim()) {
  kraus_.reserve(channel.kraus().size());
  for (const auto& k : channel.kraus()) kraus_.push_back(k.adjoint());
}

Matrix AdjointMap::operator()(const Matrix& x) const {
  if (x.rows() != dim_ || x.cols() != dim_) {
    throw DomainError(kModule, "operator dimension does not match adjoint map");
  }
  Matrix out = Matrix::Zero(dim_, dim_);
  for (const auto& k : kraus_) out.noalias() += k * x * k.adjoint();
  return out;
}

Matrix TransferMatrix::apply(const Matrix& x) const {
  if (x.rows() != dim || x.cols() != dim) {
    throw DomainError(kModule, "operator dimension does not match transfer matrix");
  }
  return linalg::unvec(matrix * linalg::vec(x), dim);
}

DensityOperator apply(const QuantumChannel& channel, const DensityOperator& rho, double tol) {
  return DensityOperator::from_matrix(linalg::hermitize(channel(rho.matrix())), tol);
}

Matrix apply(const QuantumChannel& channel, const Matrix& x) {
  return channel(x);
}

QuantumChannel tensor(const QuantumChannel& e, const QuantumChannel& f) {
  std::vector<Matrix> kraus;
  kraus.reserve(e.kraus().size() * f.kraus().size());
  for (const auto& a : e.kraus())
    for (const auto& b : f.kraus()) kraus.push_back(linalg::kron(a, b));
  // Products of valid Kraus sets are complete; the tolerance only absorbs
  // rounding accumulated in the products.
  return QuantumChannel::from_kraus(std::move(kraus), 1e-7);
}

QuantumChannel tensor_power(const QuantumChannel& e, int copies) {
  if (copies < 1) throw DomainError(kModule, "tensor power needs at least one copy");
  QuantumChannel out = e;
  for (int t = 1; t < copies; ++t) out = tensor(out, e);
  return out;
}

AdjointMap adjoint(const QuantumChannel& channel) {
  return AdjointMap(channel);
}

namespace {

TransferMatrix transfer_from(Index d, const std::vector<Matrix>& kraus) {
  TransferMatrix t{d, Matrix::Zero(d * d, d * d)};
  for (const auto& k : kraus) t.matrix.noalias() += linalg::kron(k.conjugate(), k);
  return t;
}

}  // namespace

TransferMatrix transfer_matrix(const QuantumChannel& channel) {
  return transfer_from(channel.dim(), channel.kraus());
}

TransferMatrix transfer_matrix(const AdjointMap& map) {
  return transfer_from(map.dim(), map.kraus());
}

TransferMatrix power(const TransferMatrix& t, int n) {
  if (n < 0) throw DomainError(kModule, "negative transfer-matrix power");
  const Index n2 = t.matrix.rows();
  Matrix result = Matrix::Identity(n2, n2);
  Matrix base = t.matrix;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return {t.dim, std::move(result)};
}

TransferMatrix compose(const TransferMatrix& outer, const TransferMatrix& inner) {
  if (outer.dim != inner.dim) throw DomainError(kModule, "cannot compose maps of different dimension");
  return {outer.dim, outer.matrix * inner.matrix};
}

double channel_distance(const QuantumChannel& a, const QuantumChannel& b) {
  if (a.dim() != b.dim()) throw DomainError(kModule, "channels act on different dimensions");
  return (transfer_matrix(a).matrix - transfer_matrix(b).matrix).norm();
}

QuantumChannel compress(const QuantumChannel& channel, const Matrix& isometry, double tol) {
  if (isometry.rows() != channel.dim()) {
    throw DomainError(kModule, "isometry does not match channel dimension");
  }
  std::vector<Matrix> kraus;
  for (const auto& k : channel.kraus()) {
    Matrix c = isometry.adjoint() * k * isometry;
    if (c.norm() > 1e-14) kraus.push_back(std::move(c));
  }
  if (kraus.empty()) {
    kraus.push_back(Matrix::Zero(isometry.cols(), isometry.cols()));
  }
  const auto report = validate_cptp(kraus, tol);
  if (!report.pass) {
    throw NumericalError(kModule, "compression onto a subspace is not trace preserving (residual " +
                                      std::to_string(report.residual) + "); subspace not invariant");
  }
  return QuantumChannel::from_kraus(std::move(kraus), tol);
}

ProductMap::ProductMap(std::vector<QuantumChannel> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw DomainError(kModule, "product map needs at least one factor");
  for (const auto& f : factors_) dim_ *= f.dim();
  Index left = 1;
  for (const auto& f : factors_) {
    const Index right = dim_ / (left * f.dim());
    std::vector<Matrix> ks;
    for (const auto& k : f.kraus()) {
      ks.push_back(linalg::kron(linalg::kron(Matrix::Identity(left, left), k), Matrix::Identity(right, right)));
    }
    embedded_.push_back(std::move(ks));
    left *= f.dim();
  }
}

std::vector<Index> ProductMap::factor_dims() const {
  std::vector<Index> dims;
  for (const auto& f : factors_) dims.push_back(f.dim());
  return dims;
}

Matrix ProductMap::apply(const Matrix& x) const {
  if (x.rows() != dim_ || x.cols() != dim_) throw DomainError(kModule, "operator does not match product map");
  Matrix cur = x;
  for (const auto& ks : embedded_) {
    Matrix next = Matrix::Zero(dim_, dim_);
    for (const auto& k : ks) next.noalias() += k * cur * k.adjoint();
    cur = std::move(next);
  }
  return cur;
}

Matrix ProductMap::apply_adjoint(const Matrix& x) const {
  if (x.rows() != dim_ || x.cols() != dim_) throw DomainError(kModule, "operator does not match product map");
  Matrix cur = x;
  for (const auto& ks : embedded_) {
    Matrix next = Matrix::Zero(dim_, dim_);
    for (const auto& k : ks) next.noalias() += k.adjoint() * cur * k;
    cur = std::move(next);
  }
  return cur;
}

ProductMap product_power(const QuantumChannel& e, int copies) {
  if (copies < 1) throw DomainError(kModule, "tensor power needs at least one copy");
  return ProductMap(std::vector<QuantumChannel>(static_cast<std::size_t>(copies), e));
}

MapAction action_of(const QuantumChannel& channel) {
  AdjointMap adj(channel);
  return {channel.dim(), [channel](const Matrix& x) { return channel(x); },
          [adj](const Matrix& x) { return adj(x); }};
}

MapAction action_of(const ProductMap& map) {
  return {map.dim(), [map](const Matrix& x) { return map.apply(x); },
          [map](const Matrix& x) { return map.apply_adjoint(x); }};
}

namespace cells {

QuantumChannel identity(Index dim) {
  return QuantumChannel::from_kraus({Matrix::Identity(dim, dim)});
}

QuantumChannel unitary(const Matrix& u) {
  return QuantumChannel::from_kraus({u});
}

QuantumChannel amplitude_damping(double gamma) {
  if (gamma < 0.0 || gamma > 1.0) throw DomainError(kModule, "damping rate must lie in [0, 1]");
  Matrix k0 = Matrix::Zero(2, 2);
  Matrix k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return QuantumChannel::from_kraus({k0, k1});
}

QuantumChannel flip_dephase() {
  Matrix a = Matrix::Zero(2, 2);
  Matrix b = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  b(1, 0) = 1.0;
  return QuantumChannel::from_kraus({a, b});
}

QuantumChannel shift_dephase(Index period) {
  if (period < 1) throw DomainError(kModule, "period must be positive");
  std::vector<Matrix> kraus;
  for (Index i = 0; i < period; ++i) {
    Matrix k = Matrix::Zero(period, period);
    k((i + 1) % period, i) = 1.0;
    kraus.push_back(std::move(k));
  }
  return QuantumChannel::from_kraus(std::move(kraus));
}

QuantumChannel phase_spectator(double theta) {
  Matrix u = Matrix::Zero(3, 3);
  u(0, 0) = 1.0;
  u(1, 1) = std::polar(1.0, theta);
  Matrix p2 = Matrix::Zero(3, 3);
  p2(2, 2) = 1.0;
  return QuantumChannel::from_kraus({u, p2});
}

}  // namespace cells

}  // namespace memcell
