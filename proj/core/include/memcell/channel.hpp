#pragma once

#include <functional>
#include <span>
#include <vector>

#include "memcell/types.hpp"

namespace memcell {

/// Outcome of the completeness check sum_i E_i^dag E_i = I.
struct CptpReport {
  bool pass = false;
  double residual = 0.0;  ///< Frobenius norm of sum_i E_i^dag E_i - I
  Index dim = 0;
  std::size_t kraus_count = 0;
};

/// Checks completeness of a raw Kraus list. Throws DomainError if the list is
/// empty or the operators are not square matrices of one common size.
CptpReport validate_cptp(std::span<const Matrix> kraus, double tol = Tolerances{}.cptp);

/// Unit-trace, Hermitian, positive semidefinite operator.
class DensityOperator {
 public:
  /// Validates within tol and stores the Hermitian part. Throws DomainError.
  static DensityOperator from_matrix(const Matrix& m, double tol = Tolerances{}.psd);
  static DensityOperator pure(const Vector& psi);
  static DensityOperator maximally_mixed(Index dim);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  explicit DensityOperator(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// A CPTP map X -> sum_i E_i X E_i^dag. Kraus lists are kept as given; two
/// channels are the same map when their transfer matrices agree.
class QuantumChannel {
 public:
  /// Throws DomainError unless the list passes validate_cptp at tol.
  static QuantumChannel from_kraus(std::vector<Matrix> kraus, double tol = Tolerances{}.cptp);

  Index dim() const { return dim_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  Matrix operator()(const Matrix& x) const;

 private:
  QuantumChannel(Index dim, std::vector<Matrix> kraus) : dim_(dim), kraus_(std::move(kraus)) {}
  Index dim_;
  std::vector<Matrix> kraus_;
};

/// Heisenberg-picture map X -> sum_i E_i^dag X E_i. Unital when the source
/// channel is trace preserving.
class AdjointMap {
 public:
  explicit AdjointMap(const QuantumChannel& channel);

  Index dim() const { return dim_; }
  Matrix operator()(const Matrix& x) const;
  /// Kraus operators of the adjoint, i.e. E_i^dag.
  const std::vector<Matrix>& kraus() const { return kraus_; }

 private:
  Index dim_;
  std::vector<Matrix> kraus_;
};

/// Matrix of a superoperator acting on column-stacked operators:
/// vec(E(X)) = matrix * vec(X), with matrix = sum_i conj(E_i) kron E_i.
struct TransferMatrix {
  Index dim = 0;  ///< dimension d of the underlying Hilbert space
  Matrix matrix;  ///< d^2 x d^2

  Matrix apply(const Matrix& x) const;
};

DensityOperator apply(const QuantumChannel& channel, const DensityOperator& rho,
                      double tol = Tolerances{}.psd);
Matrix apply(const QuantumChannel& channel, const Matrix& x);

/// Kraus set {E_i kron F_j}; the first factor belongs to e.
QuantumChannel tensor(const QuantumChannel& e, const QuantumChannel& f);
QuantumChannel tensor_power(const QuantumChannel& e, int copies);

AdjointMap adjoint(const QuantumChannel& channel);

TransferMatrix transfer_matrix(const QuantumChannel& channel);
TransferMatrix transfer_matrix(const AdjointMap& map);
TransferMatrix power(const TransferMatrix& t, int n);
/// outer o inner, i.e. X -> outer(inner(X)).
TransferMatrix compose(const TransferMatrix& outer, const TransferMatrix& inner);

/// Frobenius distance between transfer matrices; zero iff the maps agree.
double channel_distance(const QuantumChannel& a, const QuantumChannel& b);

/// Restriction V^dag E_i V of a channel to the range of an isometry V whose
/// range is invariant. Kraus terms that vanish on the subspace are dropped.
/// Throws NumericalError when the compression is not trace preserving.
QuantumChannel compress(const QuantumChannel& channel, const Matrix& isometry,
                        double tol = 1e-8);

/// Tensor product of channels that is never expanded into a Kraus list.
/// Each factor acts through its own Kraus operators embedded as
/// I (x) E_i (x) I, so the cost grows with the sum rather than the product of
/// the Kraus counts.
class ProductMap {
 public:
  explicit ProductMap(std::vector<QuantumChannel> factors);

  Index dim() const { return dim_; }
  const std::vector<QuantumChannel>& factors() const { return factors_; }
  std::vector<Index> factor_dims() const;

  Matrix apply(const Matrix& x) const;
  Matrix apply_adjoint(const Matrix& x) const;

 private:
  Index dim_ = 1;
  std::vector<QuantumChannel> factors_;
  std::vector<std::vector<Matrix>> embedded_;
};

ProductMap product_power(const QuantumChannel& e, int copies);

/// Forward and Heisenberg actions of a map, used by routines that only need
/// to evaluate the map.
struct MapAction {
  Index dim = 0;
  std::function<Matrix(const Matrix&)> forward;
  std::function<Matrix(const Matrix&)> adjoint;
};

MapAction action_of(const QuantumChannel& channel);
MapAction action_of(const ProductMap& map);

/// Reference memory cells.
namespace cells {

QuantumChannel identity(Index dim);
QuantumChannel unitary(const Matrix& u);
QuantumChannel amplitude_damping(double gamma);
/// Swaps |0> and |1> populations and destroys coherence:
/// {|0><1|, |1><0|}. A null cell of period 2.
QuantumChannel flip_dephase();
/// {|i+1 mod p><i|}: cycles the populations of p levels, a null cell of period p.
QuantumChannel shift_dephase(Index period);
/// Qutrit cell diag(1, e^{i theta}) on span{|0>,|1>} plus the projector onto
/// |2>, applied as two Kraus operators. Shape (1,1,1) with external
/// eigenvalues e^{+-i theta}.
QuantumChannel phase_spectator(double theta);

}  // namespace cells

}  // namespace memcell
