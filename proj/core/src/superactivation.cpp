#include "memcell/superactivation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "memcell/errors.hpp"
#include "memcell/linalg.hpp"

namespace memcell {

namespace {

constexpr const char* kModule = "superactivation";

bool is_null(const Shape& s) {
  return s.dims == std::vector<Index>{1};
}

bool in_multiset(const std::vector<SpectrumEntry>& set, Complex z) {
  return std::any_of(set.begin(), set.end(), [&](const auto& e) { return std::abs(e.value - z) <= 1e-6; });
}

const SpectrumClassification& classification(const CellAnalysis& a) {
  if (!a.spectrum.classification) throw DomainError(kModule, "spectrum has not been classified");
  return *a.spectrum.classification;
}

Matrix kron_all(const std::vector<Matrix>& factors) {
  Matrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = linalg::kron(out, factors[i]);
  return out;
}

SeparableState assemble(std::vector<ProductTerm> terms) {
  Matrix sum = Matrix::Zero(1, 1);
  for (const auto& t : terms) {
    const Matrix p = t.weight * kron_all(t.factors);
    if (sum.size() == 1) sum = Matrix::Zero(p.rows(), p.cols());
    sum += p;
  }
  return {DensityOperator::from_matrix(linalg::hermitize(sum), 1e-8), std::move(terms)};
}

std::vector<Matrix> block_averages(const CyclicFamily& fam, std::size_t m) {
  const std::size_t reps = fam.period / m;
  std::vector<Matrix> avg;
  for (std::size_t i = 0; i < m; ++i) {
    Matrix s = Matrix::Zero(fam.states.front().dim(), fam.states.front().dim());
    for (std::size_t l = 0; l < reps; ++l) s += fam.states[i + l * m].matrix();
    avg.push_back(s / static_cast<double>(reps));
  }
  return avg;
}

std::vector<SeparableState> classical_states(const CyclicFamily& fe, const CyclicFamily& ff) {
  const std::size_t m = std::gcd(fe.period, ff.period);
  const auto se = block_averages(fe, m);
  const auto sf = block_averages(ff, m);
  std::vector<SeparableState> out;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<ProductTerm> terms;
    for (std::size_t i = 0; i < m; ++i) {
      terms.push_back({1.0 / static_cast<double>(m), {se[i], sf[(i + j) % m]}});
    }
    out.push_back(assemble(std::move(terms)));
  }
  return out;
}

struct BlockPick {
  Matrix op;
  std::size_t row_sector = 0;
  std::size_t col_sector = 0;
};

const PeripheralEigenvalue& cluster_of(const PeripheralSpectrum& s, Complex value) {
  for (const auto& c : s.eigenvalues) {
    if (std::abs(c.value - value) <= 1e-6) return c;
  }
  throw DomainError(kModule, "matched value is not a peripheral eigenvalue of the cell");
}

// Eigen-operators of a cell with trivial noiseless factors split over sector
// pairs, since every Kraus operator keeps each sector invariant. Picks the
// strongest off-diagonal piece.
BlockPick off_diagonal_block(const PeripheralEigenvalue& cluster, const StructureDecomposition& dec, const char* who) {
  std::vector<Matrix> proj;
  for (const auto& s : dec.sectors) proj.push_back(s.projector());
  BlockPick best;
  double best_norm = 0.0;
  for (const auto& x : cluster.eigen_operators) {
    const Matrix xn = x / x.norm();
    for (std::size_t i = 0; i < proj.size(); ++i)
      for (std::size_t j = 0; j < proj.size(); ++j) {
        if (i == j) continue;
        Matrix piece = proj[i] * xn * proj[j];
        const double n = piece.norm();
        if (n > best_norm + 1e-12) {
          best_norm = n;
          best = {piece / n, i, j};
        }
      }
  }
  if (best_norm < 1e-6) {
    throw DomainError(kModule, std::string("eigen-operator of ") + who +
                                   " has no off-diagonal sector block; no entangled witness can be built from it");
  }
  return best;
}

std::size_t predicted_unit_multiplicity(const PeripheralSpectrum& single, int copies) {
  std::vector<SpectrumEntry> acc = single.entries();
  for (int t = 1; t < copies; ++t) {
    std::vector<SpectrumEntry> next;
    for (const auto& a : acc)
      for (const auto& b : single.entries()) {
        const Complex v = a.value * b.value;
        auto it = std::find_if(next.begin(), next.end(), [&](const auto& e) { return std::abs(e.value - v) <= 1e-7; });
        if (it == next.end()) {
          next.push_back({v, a.multiplicity * b.multiplicity});
        } else {
          it->multiplicity += a.multiplicity * b.multiplicity;
        }
      }
    acc = std::move(next);
  }
  for (const auto& e : acc) {
    if (std::abs(e.value - Complex(1.0, 0.0)) <= 1e-7) return e.multiplicity;
  }
  return 0;
}

}  // namespace

EntanglementCertificate ppt_check(const DensityOperator& state, Index dim_e, Index dim_f, double tol) {
  if (dim_e <= 0 || dim_f <= 0 || dim_e * dim_f != state.dim()) {
    throw DomainError(kModule, "bipartition " + std::to_string(dim_e) + "x" + std::to_string(dim_f) +
                                   " does not match state dimension " + std::to_string(state.dim()));
  }
  EntanglementCertificate c;
  c.dim_e = dim_e;
  c.dim_f = dim_f;
  c.min_pt_eigenvalue = linalg::min_eigenvalue(linalg::partial_transpose(state.matrix(), dim_e, dim_f));
  c.entangled = c.min_pt_eigenvalue < -tol;
  if (c.entangled) {
    c.verdict = "NPT";
  } else if (dim_e * dim_f <= 6) {
    c.verdict = "PPT (separable)";
  } else {
    c.verdict = "PPT (undecided)";
  }
  return c;
}

QuantumVerdict check_quantum_superactivation(const CellAnalysis& e, const CellAnalysis& f, double match_tol) {
  QuantumVerdict v;
  v.applicable = e.shape.max() == 1 && f.shape.max() == 1;
  if (!v.applicable) return v;
  const auto& ce = classification(e);
  const auto& cf = classification(f);
  std::optional<MatchedPair> best;
  int best_rank = 3;
  for (const auto& a : e.spectrum.eigenvalues)
    for (const auto& b : f.spectrum.eigenvalues) {
      if (std::abs(a.value * b.value - Complex(1.0, 0.0)) > match_tol) continue;
      MatchedPair p{a.value, b.value, in_multiset(ce.external, a.value), in_multiset(cf.external, b.value)};
      const int rank = p.a_external && p.b_external ? 0 : p.a_external ? 1 : p.b_external ? 2 : 3;
      if (rank < best_rank) {
        best_rank = rank;
        best = p;
      }
    }
  if (best_rank < 3) {
    v.superactivates = true;
    v.pair = best;
  }
  return v;
}

QuantumVerdict check_quantum_superactivation(const QuantumChannel& e, const QuantumChannel& f,
                                             const AnalysisOptions& options) {
  return check_quantum_superactivation(analyze(e, options), analyze(f, options));
}

bool check_self_superactivation(const CellAnalysis& e) {
  return !classification(e).external.empty();
}

bool check_self_superactivation(const QuantumChannel& e, const AnalysisOptions& options) {
  return check_self_superactivation(analyze(e, options));
}

std::vector<SeparableState> construct_classical_superactivation(const QuantumChannel& e, const QuantumChannel& f,
                                                                const AnalysisOptions& options) {
  const auto ea = analyze(e, options);
  const auto fa = analyze(f, options);
  if (!is_null(ea.shape) || !is_null(fa.shape)) {
    throw DomainError(kModule, "classical construction needs two null cells (shape (1))");
  }
  return classical_states(*ea.cyclic, *fa.cyclic);
}

std::vector<SeparableState> tensor_power_stationary_states(const QuantumChannel& e, int copies,
                                                           const AnalysisOptions& options) {
  if (copies < 1) throw DomainError(kModule, "tensor power needs at least one copy");
  const auto ea = analyze(e, options);
  if (!is_null(ea.shape)) throw DomainError(kModule, "tensor-power construction needs a null cell (shape (1))");
  const auto& fam = *ea.cyclic;
  const std::size_t p = fam.period;
  std::size_t count = 1;
  for (int t = 1; t < copies; ++t) count *= p;

  std::vector<SeparableState> out;
  std::vector<std::size_t> shift(static_cast<std::size_t>(copies), 0);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rest = idx;
    for (int c = copies - 1; c >= 1; --c) {
      shift[static_cast<std::size_t>(c)] = rest % p;
      rest /= p;
    }
    std::vector<ProductTerm> terms;
    for (std::size_t i = 0; i < p; ++i) {
      ProductTerm term{1.0 / static_cast<double>(p), {}};
      for (int c = 0; c < copies; ++c) {
        term.factors.push_back(fam.states[(i + shift[static_cast<std::size_t>(c)]) % p].matrix());
      }
      terms.push_back(std::move(term));
    }
    out.push_back(assemble(std::move(terms)));
  }
  return out;
}

EntangledWitness construct_entangled_stationary(const QuantumChannel& e, const CellAnalysis& ea,
                                                const QuantumChannel& f, const CellAnalysis& fa,
                                                const MatchedPair& pair, const Tolerances& tol) {
  if (ea.shape.max() != 1 || fa.shape.max() != 1) {
    throw DomainError(kModule, "entangled witness needs cells with |lambda|_inf = 1");
  }
  if (std::abs(pair.a * pair.b - Complex(1.0, 0.0)) > 1e-7) {
    throw DomainError(kModule, "matched values do not multiply to one");
  }
  const auto a = off_diagonal_block(cluster_of(ea.spectrum, pair.a), ea.structure, "the first cell");
  const auto b = off_diagonal_block(cluster_of(fa.spectrum, pair.b), fa.structure, "the second cell");
  if ((e(a.op) - pair.a * a.op).norm() > 1e-7 || (f(b.op) - pair.b * b.op).norm() > 1e-7) {
    throw NumericalError(kModule, "sector-block piece of an eigen-operator is not an eigen-operator");
  }

  const Matrix rho1 = ea.structure.sectors[a.row_sector].reference_state();
  const Matrix rho2 = ea.structure.sectors[a.col_sector].reference_state();
  const Matrix sig1 = fa.structure.sectors[b.row_sector].reference_state();
  const Matrix sig2 = fa.structure.sectors[b.col_sector].reference_state();
  const Matrix base = linalg::kron(rho1, sig1) + linalg::kron(rho2, sig2);
  const Matrix ab = linalg::kron(a.op, b.op);
  const Matrix coupling = ab + ab.adjoint();

  Eigen::JacobiSVD<Matrix> svd(coupling);
  const double eps_hi = 1.0 / svd.singularValues()(0);
  const auto psd = [&](double eps) { return linalg::min_eigenvalue(base + eps * coupling) >= -1e-12; };
  double lo = 0.0;
  double hi = eps_hi;
  if (psd(hi)) {
    lo = hi;
  } else {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (psd(mid) ? lo : hi) = mid;
    }
  }
  if (!(lo > 0.0)) throw NumericalError(kModule, "no positive coupling keeps the witness positive");

  EntangledWitness w{DensityOperator::maximally_mixed(1), {}, pair, 0.5 * lo, 0.0, {a.row_sector, a.col_sector},
                     {b.row_sector, b.col_sector}, 0.0};
  Matrix raw = base + w.epsilon * coupling;
  w.normalization = raw.trace().real();
  raw /= w.normalization;
  w.state = DensityOperator::from_matrix(linalg::hermitize(raw), 1e-8);
  w.certificate = ppt_check(w.state, e.dim(), f.dim(), tol.psd);
  const ProductMap product({e, f});
  w.stationarity_residual = (product.apply(w.state.matrix()) - w.state.matrix()).norm();
  return w;
}

StructureDecomposition product_decomposition(const QuantumChannel& e, const QuantumChannel& f,
                                             const AnalysisOptions& options) {
  const auto spectrum = tensor_spectrum(peripheral_spectrum(e, options.tol), peripheral_spectrum(f, options.tol),
                                        options.tol, true);
  return structure_decomposition(action_of(ProductMap({e, f})), spectrum, options);
}

GrowthTable tensor_power_analysis(const QuantumChannel& e, int t_max, const AnalysisOptions& options,
                                  const GrowthBudget& budget) {
  if (t_max < 1) throw DomainError(kModule, "t_max must be at least 1");
  GrowthTable table;
  table.requested = t_max;
  const auto single = peripheral_spectrum(e, options.tol);
  Index dim = 1;
  for (int t = 1; t <= t_max; ++t) {
    dim *= e.dim();
    if (dim > budget.max_dim) {
      table.truncated = true;
      table.truncation_reason = "dimension " + std::to_string(dim) + " exceeds budget " +
                                std::to_string(budget.max_dim);
      break;
    }
    const std::size_t fix = predicted_unit_multiplicity(single, t);
    if (fix > budget.max_fix_dimension) {
      table.truncated = true;
      table.truncation_reason = "fixed space of dimension " + std::to_string(fix) + " exceeds budget " +
                                std::to_string(budget.max_fix_dimension);
      break;
    }
    const auto spectrum = tensor_power_spectrum(single, t, options.tol, true);
    const auto dec = structure_decomposition(action_of(product_power(e, t)), spectrum, options);
    const Shape s = dec.shape();
    table.rows.push_back({t, s.length(), s.max(), spectrum.size()});
    if (table.rows.size() > 1 && table.rows.back().max < table.rows[table.rows.size() - 2].max) {
      throw NumericalError(kModule, "|lambda|_inf decreased from t = " + std::to_string(t - 1) + " to t = " +
                                        std::to_string(t));
    }
  }
  return table;
}

SuperactivationReport superactivation_report(const QuantumChannel& e, const QuantumChannel& f, int t_max,
                                             const AnalysisOptions& options, const GrowthBudget& budget) {
  const auto ea = analyze(e, options);
  const auto fa = analyze(f, options);
  SuperactivationReport r;
  r.shape_e = ea.shape;
  r.shape_f = fa.shape;
  r.shape_product = product_decomposition(e, f, options).shape();

  r.classical_applicable = ea.shape.length() == 1 && fa.shape.length() == 1;
  r.classical_m = r.shape_product.length();
  r.classical_verdict = r.classical_applicable && r.classical_m > 1;
  if (is_null(ea.shape) && is_null(fa.shape)) {
    r.classical_states = classical_states(*ea.cyclic, *fa.cyclic);
    for (std::size_t j = 0; j < r.classical_states.size(); ++j) {
      r.certificates.push_back({"classical[" + std::to_string(j) + "]",
                                ppt_check(r.classical_states[j].state, e.dim(), f.dim(), options.tol.psd)});
    }
  }

  r.quantum = check_quantum_superactivation(ea, fa);
  if (r.quantum.superactivates) {
    try {
      r.witness = construct_entangled_stationary(e, ea, f, fa, *r.quantum.pair, options.tol);
      r.certificates.push_back({"witness", r.witness->certificate});
    } catch (const DomainError& err) {
      r.witness_error = err.what();
    }
  }
  r.growth = tensor_power_analysis(e, t_max, options, budget);
  return r;
}

}  // namespace memcell
