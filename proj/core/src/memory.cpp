#include "memcell/memory.hpp"

#include <algorithm>
#include <string>

#include "memcell/errors.hpp"
#include "memcell/linalg.hpp"

namespace memcell {

namespace {

constexpr const char* kModule = "memory";

}  // namespace

DensityOperator encode(const StructureDecomposition& decomposition, const HybridPayload& payload) {
  if (payload.address >= decomposition.sectors.size()) {
    throw DomainError(kModule, "address " + std::to_string(payload.address) + " out of range; the cell has " +
                                   std::to_string(decomposition.sectors.size()) + " sectors");
  }
  const Sector& s = decomposition.sectors[payload.address];
  if (payload.payload.dim() != s.d) {
    throw DomainError(kModule, "payload has dimension " + std::to_string(payload.payload.dim()) + " but sector " +
                                   std::to_string(s.index) + " stores dimension " + std::to_string(s.d));
  }
  const Matrix e = s.embedding();
  const Matrix local = linalg::kron(payload.payload.matrix(), s.sigma.matrix());
  return DensityOperator::from_matrix(linalg::hermitize(e * local * e.adjoint()), 1e-8);
}

HybridPayload decode(const StructureDecomposition& decomposition, const DensityOperator& state, double mass_tol) {
  if (state.dim() != decomposition.dim) throw DomainError(kModule, "state dimension does not match the cell");
  if (decomposition.sectors.empty()) throw DomainError(kModule, "decomposition has no sectors");
  std::size_t best = 0;
  double best_mass = -1.0;
  for (const auto& s : decomposition.sectors) {
    const double mass = (s.projector() * state.matrix()).trace().real();
    if (mass > best_mass) {
      best_mass = mass;
      best = s.index;
    }
  }
  if (best_mass < 1.0 - mass_tol) {
    throw DomainError(kModule, "state is not confined to one sector (largest sector mass " +
                                   std::to_string(best_mass) + ")");
  }
  const Sector& s = decomposition.sectors[best];
  const Matrix e = s.embedding();
  Matrix marginal = linalg::partial_trace_second(e.adjoint() * state.matrix() * e, s.d, s.m);
  marginal = linalg::hermitize(marginal) / marginal.trace().real();
  return {best, DensityOperator::from_matrix(marginal, 1e-8)};
}

std::vector<RoundTrip> round_trip(const QuantumChannel& channel, const StructureDecomposition& decomposition,
                                  const HybridPayload& payload, const std::vector<int>& n_list) {
  if (channel.dim() != decomposition.dim) throw DomainError(kModule, "decomposition belongs to another channel");
  const DensityOperator encoded = encode(decomposition, payload);
  std::vector<RoundTrip> out;
  for (int n : n_list) {
    if (n < 0) throw DomainError(kModule, "number of channel uses must be non-negative");
    Matrix x = encoded.matrix();
    for (int i = 0; i < n; ++i) x = linalg::hermitize(channel(x));
    const auto decoded = decode(decomposition, DensityOperator::from_matrix(x, 1e-8));
    out.push_back({n, decoded.address, decoded.address == payload.address,
                   decoded.address == payload.address
                       ? linalg::fidelity(payload.payload.matrix(), decoded.payload.matrix())
                       : 0.0});
  }
  return out;
}

}  // namespace memcell
