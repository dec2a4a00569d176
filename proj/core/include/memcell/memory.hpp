#pragma once

#include <vector>

#include "memcell/channel.hpp"
#include "memcell/fixpoint.hpp"

namespace memcell {

/// A classical address (sector index) together with a quantum payload on the
/// noiseless factor of that sector.
struct HybridPayload {
  std::size_t address = 0;
  DensityOperator payload;
};

/// Embeds payload (x) sigma_k into sector k. Throws DomainError for an
/// unknown address or a payload of the wrong dimension.
DensityOperator encode(const StructureDecomposition& decomposition, const HybridPayload& payload);

/// Reads the address as the sector holding the state's mass and the payload
/// as the noiseless marginal of that sector. Throws DomainError if less than
/// 1 - mass_tol of the trace sits in a single sector.
HybridPayload decode(const StructureDecomposition& decomposition, const DensityOperator& state,
                     double mass_tol = 1e-6);

struct RoundTrip {
  int n = 0;
  std::size_t address = 0;
  bool address_recovered = false;
  double fidelity = 0.0;
};

/// encode, apply the channel n times, decode, for every n in n_list.
std::vector<RoundTrip> round_trip(const QuantumChannel& channel, const StructureDecomposition& decomposition,
                                  const HybridPayload& payload, const std::vector<int>& n_list);

}  // namespace memcell
