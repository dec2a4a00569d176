#pragma once

#include <optional>
#include <string>
#include <vector>

#include "memcell/channel.hpp"
#include "memcell/fixpoint.hpp"
#include "memcell/types.hpp"

namespace memcell {

/// Smallest eigenvalue of the partial transpose over the second factor.
struct EntanglementCertificate {
  double min_pt_eigenvalue = 0.0;
  Index dim_e = 0;
  Index dim_f = 0;
  bool entangled = false;  ///< min_pt_eigenvalue < -tol
  /// "NPT", "PPT (separable)" for dim_e * dim_f <= 6, else "PPT (undecided)".
  std::string verdict;
};

EntanglementCertificate ppt_check(const DensityOperator& state, Index dim_e, Index dim_f, double tol = 1e-9);

/// a in eta(e), b in eta(f) with ab = 1.
struct MatchedPair {
  Complex a;
  Complex b;
  bool a_external = false;
  bool b_external = false;
};

struct QuantumVerdict {
  /// False when either cell already stores a qubit (|lambda|_inf > 1).
  bool applicable = false;
  bool superactivates = false;
  std::optional<MatchedPair> pair;
};

/// Spectral test for quantum super-activation of e (x) f. Pairs with both
/// values external are preferred, then a external, then b external.
/// Requires classified spectra.
QuantumVerdict check_quantum_superactivation(const CellAnalysis& e, const CellAnalysis& f,
                                             double match_tol = 1e-7);
QuantumVerdict check_quantum_superactivation(const QuantumChannel& e, const QuantumChannel& f,
                                             const AnalysisOptions& options = {});

/// True iff the cell has an external peripheral eigenvalue.
bool check_self_superactivation(const CellAnalysis& e);
bool check_self_superactivation(const QuantumChannel& e, const AnalysisOptions& options = {});

/// weight * (factors[0] (x) factors[1] (x) ...).
struct ProductTerm {
  double weight = 0.0;
  std::vector<Matrix> factors;
};

/// A stationary state of a product channel together with an explicit
/// decomposition into product states.
struct SeparableState {
  DensityOperator state;
  std::vector<ProductTerm> terms;
};

/// Mutually orthogonal separable stationary states of e (x) f for two null
/// cells: m = gcd(p(e), p(f)) states sum_i sigma^i (x) rho^{i+j} / m built
/// from m-step averages of the cyclic families. Throws DomainError unless
/// both shapes are (1).
std::vector<SeparableState> construct_classical_superactivation(const QuantumChannel& e, const QuantumChannel& f,
                                                                const AnalysisOptions& options = {});

/// p^{t-1} separable stationary states of the t-fold power of a null cell:
/// sum_i rho_i (x) rho_{i+j_2} (x) ... (x) rho_{i+j_t} / p over all
/// (j_2, ..., j_t), in lexicographic order.
std::vector<SeparableState> tensor_power_stationary_states(const QuantumChannel& e, int copies,
                                                           const AnalysisOptions& options = {});

struct EntangledWitness {
  DensityOperator state;
  EntanglementCertificate certificate;
  MatchedPair pair;
  double epsilon = 0.0;
  double normalization = 0.0;  ///< trace K before normalizing
  std::size_t e_sectors[2] = {0, 0};
  std::size_t f_sectors[2] = {0, 0};
  double stationarity_residual = 0.0;
};

/// Builds (rho_1 (x) sigma_1 + rho_2 (x) sigma_2 + eps (A (x) B + h.c.)) / K
/// where A and B are eigen-operators of the matched values supported on a
/// single off-diagonal sector pair. Throws DomainError when an eigen-operator
/// has no off-diagonal block.
EntangledWitness construct_entangled_stationary(const QuantumChannel& e, const CellAnalysis& ea,
                                                const QuantumChannel& f, const CellAnalysis& fa,
                                                const MatchedPair& pair, const Tolerances& tol = {});

struct GrowthRow {
  int t = 0;
  std::size_t length = 0;  ///< |lambda(E^{(x)t})|
  Index max = 0;           ///< |lambda(E^{(x)t})|_inf
  std::size_t fix_dimension = 0;
};

struct GrowthBudget {
  Index max_dim = 81;                  ///< d^t must not exceed this
  std::size_t max_fix_dimension = 1024;
};

struct GrowthTable {
  std::vector<GrowthRow> rows;
  int requested = 0;
  bool truncated = false;
  std::string truncation_reason;
};

/// Shapes of E^{(x)t} for t = 1..t_max, each from a structure decomposition
/// of the tensor power. Stops with truncated = true when the next power
/// exceeds the budget. Throws NumericalError if |lambda|_inf decreases.
GrowthTable tensor_power_analysis(const QuantumChannel& e, int t_max, const AnalysisOptions& options = {},
                                  const GrowthBudget& budget = {});

/// Structure decomposition of e (x) f through the product spectrum.
StructureDecomposition product_decomposition(const QuantumChannel& e, const QuantumChannel& f,
                                             const AnalysisOptions& options = {});

struct LabeledCertificate {
  std::string state;
  EntanglementCertificate certificate;
};

struct SuperactivationReport {
  Shape shape_e;
  Shape shape_f;
  Shape shape_product;
  bool classical_applicable = false;  ///< |lambda(e)| = |lambda(f)| = 1
  bool classical_verdict = false;     ///< ... and |lambda(e (x) f)| > 1
  std::size_t classical_m = 0;
  std::vector<SeparableState> classical_states;
  QuantumVerdict quantum;
  std::optional<EntangledWitness> witness;
  std::string witness_error;
  std::vector<LabeledCertificate> certificates;
  GrowthTable growth;
};

SuperactivationReport superactivation_report(const QuantumChannel& e, const QuantumChannel& f, int t_max,
                                             const AnalysisOptions& options = {},
                                             const GrowthBudget& budget = {});

}  // namespace memcell
