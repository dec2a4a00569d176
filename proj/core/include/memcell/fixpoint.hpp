#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "memcell/channel.hpp"
#include "memcell/spectral.hpp"
#include "memcell/types.hpp"

namespace memcell {

/// One block H_{A_k} (x) H_{B_k} of the fixed-point decomposition.
///
/// sector_isometry maps C^{d*m} onto the block inside H. factorization is a
/// unitary on C^{d*m} such that sector_isometry * factorization carries
/// C^d (x) C^m (index a*m + b) onto the block with the noiseless factor first.
struct Sector {
  std::size_t index = 0;
  Matrix sector_isometry;
  Index d = 0;
  Index m = 0;
  DensityOperator sigma;
  Matrix factorization;

  Matrix projector() const;
  /// sector_isometry * factorization.
  Matrix embedding() const;
  /// (I/d (x) sigma) embedded into H.
  Matrix reference_state() const;
};

/// Shape of a memory cell: noiseless dimensions in descending order.
struct Shape {
  std::vector<Index> dims;

  std::size_t length() const { return dims.size(); }
  Index max() const;
  bool operator==(const Shape&) const = default;
};

struct StructureDecomposition {
  Index dim = 0;
  std::vector<Sector> sectors;
  Matrix decaying_projector;
  /// Hilbert-Schmidt orthonormal Hermitian basis of fix(E).
  std::vector<Matrix> fix_basis;
  std::uint64_t seed_used = 0;
  int attempts = 0;

  Shape shape() const;
};

/// Orthonormal Hermitian basis of the eigenvalue-1 eigenspace of the channel.
std::vector<Matrix> fixed_point_space(const QuantumChannel& channel, const Tolerances& tol = {});
std::vector<Matrix> fixed_point_space(const PeripheralSpectrum& spectrum);

/// Sectors of the fixed-point algebra, computed from the maximal stationary
/// state and generic elements of the fixed algebra of the Heisenberg map
/// compressed to its support. Generic elements are drawn from options.seed;
/// degenerate draws are retried with seed + attempt.
StructureDecomposition structure_decomposition(const QuantumChannel& channel,
                                               const AnalysisOptions& options = {});
/// Same, for a map given only through its action. spectrum must contain at
/// least the eigenvalue-1 cluster of the map.
StructureDecomposition structure_decomposition(const MapAction& map, const PeripheralSpectrum& spectrum,
                                               const AnalysisOptions& options = {});

Shape shape(const QuantumChannel& channel, const AnalysisOptions& options = {});

/// Fills spectrum.classification: internal values are the peripheral spectra
/// of the channel compressed to each sector, external values are what is left
/// of the full spectrum. Throws NumericalError if a sector value cannot be
/// matched in the full spectrum.
PeripheralSpectrum classify_eigenvalues(const QuantumChannel& channel, PeripheralSpectrum spectrum,
                                        const StructureDecomposition& decomposition,
                                        const Tolerances& tol = {});
PeripheralSpectrum classify_eigenvalues(const QuantumChannel& channel, const AnalysisOptions& options = {});

/// Everything the analyze command reports about a single cell.
struct CellAnalysis {
  PeripheralSpectrum spectrum;
  StructureDecomposition structure;
  Shape shape;
  /// Present for null cells.
  std::optional<CyclicFamily> cyclic;
};

CellAnalysis analyze(const QuantumChannel& channel, const AnalysisOptions& options = {});

}  // namespace memcell
