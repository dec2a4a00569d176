#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "memcell/channel.hpp"
#include "memcell/fixpoint.hpp"
#include "memcell/types.hpp"

namespace memcell::oracle {

/// Algebraic multiplicity of eigenvalue 1 of the transfer matrix, counted
/// from a full eigensolve: eigenvalues within tol of 1.
std::size_t fix_dimension_oracle(const QuantumChannel& channel, double tol = 1e-7);

/// M^n by repeated squaring.
TransferMatrix power_convergence_oracle(const QuantumChannel& channel, int n);

/// Trace left on the range of projector after n applications to rho.
double residual_mass(const QuantumChannel& channel, const Matrix& rho, const Matrix& projector, int n);

/// One planted block C^d (x) C^m with noise state sigma (random when absent).
struct PlantedBlock {
  Index d = 1;
  Index m = 1;
  std::optional<Matrix> sigma;
};

/// Without planted blocks: a random channel from a Haar-like isometry split
/// into kraus_count Kraus operators. With planted blocks: the blocks, a
/// decaying remainder of dimension dim - sum d*m, and a random basis change.
struct RandomChannelSpec {
  Index dim = 2;
  std::size_t kraus_count = 2;
  std::uint64_t seed = 0;
  std::vector<PlantedBlock> planted;
};

QuantumChannel random_channel(const RandomChannelSpec& spec);

struct PlantedChannel {
  QuantumChannel channel;
  std::vector<PlantedBlock> blocks;  ///< sigma filled in
  /// Per block: projector onto the block and (I/d (x) sigma) embedded in H.
  std::vector<Matrix> projectors;
  std::vector<Matrix> references;
};

PlantedChannel planted_channel(const RandomChannelSpec& spec);

/// Outcome of comparing a decomposition with the planted truth.
struct Recovery {
  bool pass = false;
  double sigma_error = 0.0;      ///< largest reference-state distance over matched blocks
  double projector_error = 0.0;  ///< largest projector distance over matched blocks
  std::string detail;
};

Recovery compare_with_planted(const PlantedChannel& planted, const StructureDecomposition& dec, double tol = 1e-7);

/// C^2 (x) C^2 with the second factor replaced by a fixed full-rank sigma, plus
/// one decaying level feeding into the block: shape (2), d = 2, m = 2.
PlantedChannel engineered_qubit_cell();

/// Random cell of dimension 2 or 3 whose noiseless factors are all trivial in
/// most draws: a rotated unitary, a diagonal phase/dephasing cell with phases
/// on a pi/3 or pi/2 grid, or such a cell with one decaying level. Callers
/// reject draws with |lambda|_inf > 1.
QuantumChannel random_classical_cell(std::mt19937_64& rng);

struct CrossCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Re-runs every independent cross-check on seeded instances.
std::vector<CrossCheck> run_cross_checks(std::uint64_t seed = 20180930);

}  // namespace memcell::oracle
