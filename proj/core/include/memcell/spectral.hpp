#pragma once

#include <optional>
#include <vector>

#include "memcell/channel.hpp"
#include "memcell/types.hpp"

namespace memcell {

/// One value of a multiset together with its multiplicity.
struct SpectrumEntry {
  Complex value;
  std::size_t multiplicity = 0;
};

/// A cluster of unit-modulus eigenvalues of the transfer matrix.
///
/// eigen_operators span the eigenspace {X : E(X) = value X}. dual_operators
/// are the matching left eigenvectors, normalized so that
/// tr(dual_i^dag X_j) = delta_ij. Together they give the spectral projector
/// X -> sum_i tr(dual_i^dag X) X_i.
struct PeripheralEigenvalue {
  Complex value;
  std::size_t multiplicity = 0;
  std::vector<Matrix> eigen_operators;
  std::vector<Matrix> dual_operators;
};

/// Internal values per sector and the remaining external values.
struct SpectrumClassification {
  std::vector<std::vector<SpectrumEntry>> internal;
  std::vector<SpectrumEntry> external;
};

struct PeripheralSpectrum {
  Index dim = 0;
  /// Sorted by phase in [0, 2 pi).
  std::vector<PeripheralEigenvalue> eigenvalues;
  /// Filled by classify_eigenvalues() once a structure decomposition exists.
  std::optional<SpectrumClassification> classification;

  /// Total multiplicity |eta|.
  std::size_t size() const;
  std::vector<SpectrumEntry> entries() const;
  /// The eigenvalue-1 cluster, or nullptr when absent.
  const PeripheralEigenvalue* unit() const;
};

/// Unit-modulus part of the spectrum of the transfer matrix, with left and
/// right eigen-operators. Throws NumericalError if the eigensolver fails, if
/// a peripheral eigenvalue is defective, or if an eigen-operator leaks into
/// the decaying subspace.
PeripheralSpectrum peripheral_spectrum(const QuantumChannel& channel, const Tolerances& tol = {});

/// Peripheral spectrum of a kron b from the spectra of the factors: values
/// multiply and eigen-operators tensor. With unit_only, only the eigenvalue-1
/// cluster of the product is kept.
PeripheralSpectrum tensor_spectrum(const PeripheralSpectrum& a, const PeripheralSpectrum& b,
                                   const Tolerances& tol = {}, bool unit_only = false);

/// Peripheral spectrum of the t-fold tensor power, built factor by factor.
PeripheralSpectrum tensor_power_spectrum(const PeripheralSpectrum& single, int copies,
                                         const Tolerances& tol = {}, bool unit_only = false);

/// Spectral projector of one peripheral cluster.
TransferMatrix spectral_projector(const PeripheralEigenvalue& cluster, Index dim);

/// Phase projection E_phi: the sum of the spectral projectors of all
/// peripheral eigenvalues. Checked to be idempotent.
TransferMatrix phase_projection(const PeripheralSpectrum& spectrum);
TransferMatrix phase_projection(const QuantumChannel& channel, const Tolerances& tol = {});

/// Stationary state of maximal support: the eigenvalue-1 projector applied to
/// I/d, Hermitized and normalized.
DensityOperator maximal_stationary_state(const PeripheralSpectrum& spectrum);
DensityOperator maximal_stationary_state(const QuantumChannel& channel, const Tolerances& tol = {});

/// Period of a null cell (one-dimensional fixed space). The peripheral values
/// are verified to be exactly the p-th roots of unity, each simple.
/// Throws DomainError for cells with a larger fixed space.
std::size_t period(const PeripheralSpectrum& spectrum, const Tolerances& tol = {});
std::size_t period(const QuantumChannel& channel, const Tolerances& tol = {});

/// States rho_0..rho_{p-1} with E(rho_i) = rho_{i+1 mod p}.
struct CyclicFamily {
  std::size_t period = 0;
  std::vector<DensityOperator> states;
};

/// Cyclic family of a null cell. The subspaces come from the eigenspaces of
/// the unitary X_1 (rho*)^{-1} on supp(rho*), where X_1 is the eigen-operator
/// of e^{2 pi i/p}. The rotation is fixed so that rho_0 carries the most
/// weight on the lowest-index basis vector any member touches.
CyclicFamily cyclic_states(const QuantumChannel& channel, const Tolerances& tol = {});
CyclicFamily cyclic_states(const QuantumChannel& channel, const PeripheralSpectrum& spectrum,
                           const Tolerances& tol = {});

}  // namespace memcell
