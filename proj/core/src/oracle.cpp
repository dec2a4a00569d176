#include "memcell/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "memcell/errors.hpp"
#include "memcell/linalg.hpp"
#include "memcell/memory.hpp"
#include "memcell/spectral.hpp"
#include "memcell/superactivation.hpp"

namespace memcell::oracle {

namespace {

constexpr const char* kModule = "oracle";

Matrix random_isometry(Index rows, Index cols, std::mt19937_64& rng) {
  return linalg::random_unitary(rows, rng).leftCols(cols);
}

Matrix embed(const Matrix& block, Index dim, Index row, Index col) {
  Matrix out = Matrix::Zero(dim, dim);
  out.block(row, col, block.rows(), block.cols()) = block;
  return out;
}

Complex grid_phase(int steps, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, steps - 1);
  return std::polar(1.0, 2.0 * std::numbers::pi * pick(rng) / steps);
}

Vector random_unit_vector(Index n, std::mt19937_64& rng) {
  Vector v = linalg::random_gaussian(n, 1, rng).col(0);
  return v / v.norm();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

}  // namespace

std::size_t fix_dimension_oracle(const QuantumChannel& channel, double tol) {
  const Matrix m = transfer_matrix(channel).matrix;
  Eigen::ComplexEigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) throw NumericalError(kModule, "eigensolver failed");
  std::size_t count = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()(i) - Complex(1.0, 0.0)) <= tol) ++count;
  }
  return count;
}

TransferMatrix power_convergence_oracle(const QuantumChannel& channel, int n) {
  if (n < 1) throw DomainError(kModule, "power must be at least 1");
  return power(transfer_matrix(channel), n);
}

double residual_mass(const QuantumChannel& channel, const Matrix& rho, const Matrix& projector, int n) {
  const Matrix out = power_convergence_oracle(channel, n).apply(rho);
  return (projector * out).trace().real();
}

QuantumChannel random_channel(const RandomChannelSpec& spec) {
  if (!spec.planted.empty()) return planted_channel(spec).channel;
  if (spec.dim < 1 || spec.kraus_count < 1) throw DomainError(kModule, "random channel needs dim >= 1 and kraus_count >= 1");
  std::mt19937_64 rng(spec.seed);
  const Index k = static_cast<Index>(spec.kraus_count);
  const Matrix v = random_isometry(spec.dim * k, spec.dim, rng);
  std::vector<Matrix> kraus;
  for (Index l = 0; l < k; ++l) kraus.push_back(v.middleRows(l * spec.dim, spec.dim));
  return QuantumChannel::from_kraus(std::move(kraus), 1e-8);
}

PlantedChannel planted_channel(const RandomChannelSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  Index used = 0;
  for (const auto& b : spec.planted) {
    if (b.d < 1 || b.m < 1) throw DomainError(kModule, "planted blocks need d, m >= 1");
    used += b.d * b.m;
  }
  if (spec.planted.empty() || used > spec.dim) {
    throw DomainError(kModule, "planted blocks need a total dimension of at most dim");
  }
  const Index dim = spec.dim;
  const Index decay = dim - used;

  std::vector<Matrix> kraus;
  std::vector<PlantedBlock> blocks;
  std::vector<Matrix> isometries;
  Index offset = 0;
  for (const auto& b : spec.planted) {
    Matrix sigma = b.sigma ? *b.sigma : linalg::random_density(b.m, rng);
    if (sigma.rows() != b.m) throw DomainError(kModule, "planted sigma has the wrong dimension");
    sigma = DensityOperator::from_matrix(sigma, 1e-8).matrix();
    const auto es = linalg::eigh(sigma);
    // Trace out the second factor and prepare sigma.
    for (Index j = 0; j < b.m; ++j) {
      const double s = std::max(es.values(j), 0.0);
      if (s == 0.0) continue;
      for (Index c = 0; c < b.m; ++c) {
        const Matrix replace = std::sqrt(s) * es.vectors.col(j) * Vector::Unit(b.m, c).adjoint();
        kraus.push_back(embed(linalg::kron(Matrix::Identity(b.d, b.d), replace), dim, offset, offset));
      }
    }
    Matrix iso = Matrix::Zero(dim, b.d * b.m);
    iso.middleRows(offset, b.d * b.m) = Matrix::Identity(b.d * b.m, b.d * b.m);
    isometries.push_back(iso);
    blocks.push_back({b.d, b.m, sigma});
    offset += b.d * b.m;
  }
  if (decay > 0) {
    // The decaying levels leak into the whole space through a random isometry.
    const Index copies = 2;
    const Matrix w = random_isometry(dim * copies, decay, rng);
    for (Index l = 0; l < copies; ++l) kraus.push_back(embed(w.middleRows(l * dim, dim), dim, 0, used));
  }

  const Matrix rot = linalg::random_unitary(dim, rng);
  for (auto& k : kraus) k = rot * k * rot.adjoint();

  PlantedChannel out{QuantumChannel::from_kraus(std::move(kraus), 1e-8), blocks, {}, {}};
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Matrix s = rot * isometries[i];
    const Index d = blocks[i].d;
    out.projectors.push_back(s * s.adjoint());
    const Matrix local = linalg::kron(Matrix::Identity(d, d) / static_cast<double>(d), *blocks[i].sigma);
    out.references.push_back(s * local * s.adjoint());
  }
  return out;
}

Recovery compare_with_planted(const PlantedChannel& planted, const StructureDecomposition& dec, double tol) {
  Recovery r;
  if (dec.sectors.size() != planted.blocks.size()) {
    r.detail = "recovered " + std::to_string(dec.sectors.size()) + " sectors, planted " +
               std::to_string(planted.blocks.size());
    return r;
  }
  std::vector<bool> used(dec.sectors.size(), false);
  for (std::size_t i = 0; i < planted.blocks.size(); ++i) {
    std::size_t best = dec.sectors.size();
    double best_err = 1e300;
    for (std::size_t k = 0; k < dec.sectors.size(); ++k) {
      if (used[k]) continue;
      const double err = (dec.sectors[k].projector() - planted.projectors[i]).norm();
      if (err < best_err) {
        best_err = err;
        best = k;
      }
    }
    used[best] = true;
    const Sector& s = dec.sectors[best];
    r.projector_error = std::max(r.projector_error, best_err);
    r.sigma_error = std::max(r.sigma_error, (s.reference_state() - planted.references[i]).norm());
    if (s.d != planted.blocks[i].d || s.m != planted.blocks[i].m) {
      r.detail = "block " + std::to_string(i) + " planted (" + std::to_string(planted.blocks[i].d) + "," +
                 std::to_string(planted.blocks[i].m) + "), recovered (" + std::to_string(s.d) + "," +
                 std::to_string(s.m) + ")";
      return r;
    }
  }
  r.pass = r.projector_error <= tol && r.sigma_error <= tol;
  r.detail = "projector error " + fmt(r.projector_error) + ", reference-state error " + fmt(r.sigma_error);
  return r;
}

PlantedChannel engineered_qubit_cell() {
  Matrix sigma(2, 2);
  sigma << Complex(0.7, 0.0), Complex(0.1, 0.05), Complex(0.1, -0.05), Complex(0.3, 0.0);
  RandomChannelSpec spec;
  spec.dim = 5;
  spec.seed = 5;
  spec.planted = {{2, 2, sigma}};
  return planted_channel(spec);
}

QuantumChannel random_classical_cell(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick_family(0, 2);
  std::uniform_int_distribution<int> pick_dim(2, 3);
  std::uniform_int_distribution<int> pick_kraus(1, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int family = pick_family(rng);
  // One grid per cell so that phase differences of two cells can cancel.
  const int steps = unit(rng) < 0.5 ? 6 : 4;
  std::vector<Matrix> kraus;
  Index dim = 0;

  if (family == 0) {
    dim = pick_dim(rng);
    Matrix diag = Matrix::Zero(dim, dim);
    const bool grid = unit(rng) < 0.75;
    for (Index a = 0; a < dim; ++a) {
      diag(a, a) = grid ? grid_phase(steps, rng) : std::polar(1.0, 2.0 * std::numbers::pi * unit(rng));
    }
    kraus.push_back(diag);
  } else {
    // Diagonal cell on the phase levels; coefficient vectors shared between
    // levels keep coherences, independent ones dephase them.
    const Index levels = family == 1 ? pick_dim(rng) : 2;
    dim = family == 1 ? levels : 3;
    const Index n = pick_kraus(rng);
    const Vector shared = random_unit_vector(n, rng);
    std::vector<Vector> coeff;
    std::vector<Complex> phase;
    for (Index a = 0; a < levels; ++a) {
      // A single coefficient is a bare phase, which would push the level off the grid.
      coeff.push_back(n == 1 || unit(rng) < 0.6 ? shared : random_unit_vector(n, rng));
      phase.push_back(grid_phase(steps, rng));
    }
    for (Index j = 0; j < n; ++j) {
      Matrix k = Matrix::Zero(dim, dim);
      for (Index a = 0; a < levels; ++a) k(a, a) = coeff[static_cast<std::size_t>(a)](j) * phase[static_cast<std::size_t>(a)];
      kraus.push_back(k);
    }
    if (family == 2) {
      const double g = unit(rng);
      Matrix k0 = Matrix::Zero(dim, dim);
      Matrix k1 = Matrix::Zero(dim, dim);
      k0(0, 2) = std::sqrt(g);
      k1(1, 2) = std::sqrt(1.0 - g);
      kraus.push_back(k0);
      kraus.push_back(k1);
    }
  }
  const Matrix rot = linalg::random_unitary(dim, rng);
  for (auto& k : kraus) k = rot * k * rot.adjoint();
  return QuantumChannel::from_kraus(std::move(kraus), 1e-8);
}

std::vector<CrossCheck> run_cross_checks(std::uint64_t seed) {
  std::vector<CrossCheck> out;
  AnalysisOptions options;
  options.seed = seed;

  {
    double worst = 0.0;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 20; ++i) {
      const auto c = random_channel({2 + i % 3, static_cast<std::size_t>(1 + i % 4), seed + static_cast<std::uint64_t>(i), {}});
      const Matrix x = linalg::random_gaussian(c.dim(), c.dim(), rng);
      worst = std::max(worst, (transfer_matrix(c).apply(x) - c(x)).norm());
    }
    out.push_back({"transfer matrix reproduces the Kraus action", worst <= 1e-10, "max residual " + fmt(worst)});
  }
  {
    int bad = 0;
    for (int i = 0; i < 20; ++i) {
      RandomChannelSpec spec{2 + i % 3, static_cast<std::size_t>(1 + i % 3), seed + 100 + static_cast<std::uint64_t>(i), {}};
      if (i % 2 == 1) {
        spec.dim = 4;
        spec.planted = {{1, 1, {}}, {1, 2, {}}};
        if (i % 4 == 3) spec.planted = {{2, 1, {}}};
      }
      const auto c = random_channel(spec);
      Index total = 0;
      for (const auto& s : structure_decomposition(c, options).sectors) total += s.d * s.d;
      if (static_cast<std::size_t>(total) != fix_dimension_oracle(c)) ++bad;
    }
    out.push_back({"sum of d_k^2 equals the eigenvalue-1 multiplicity", bad == 0,
                   std::to_string(bad) + " disagreements in 20 channels"});
  }
  {
    int bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      RandomChannelSpec spec;
      spec.dim = 5;
      spec.seed = seed + 200 + static_cast<std::uint64_t>(i);
      spec.planted = i % 2 == 0 ? std::vector<PlantedBlock>{{2, 1, {}}, {1, 2, {}}}
                                : std::vector<PlantedBlock>{{1, 1, {}}, {1, 1, {}}};
      const auto p = planted_channel(spec);
      const auto r = compare_with_planted(p, structure_decomposition(p.channel, options));
      worst = std::max(worst, r.sigma_error);
      if (!r.pass) ++bad;
    }
    out.push_back({"planted structure is recovered", bad == 0,
                   std::to_string(bad) + " failures in 20, worst reference error " + fmt(worst)});
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const auto c = random_channel({2 + i % 3, 2, seed + 300 + static_cast<std::uint64_t>(i), {}});
      const auto s = peripheral_spectrum(c, options.tol);
      const auto phi = phase_projection(s);
      const Matrix m = transfer_matrix(c).matrix;
      Matrix mn = m;
      for (int n = 1; n <= 10; ++n) {
        Matrix expected = Matrix::Zero(m.rows(), m.cols());
        for (const auto& cl : s.eigenvalues) expected += std::pow(cl.value, n) * spectral_projector(cl, c.dim()).matrix;
        worst = std::max(worst, (mn * phi.matrix - expected).norm());
        mn = mn * m;
      }
    }
    out.push_back({"peripheral part is invariant under powers", worst <= 1e-8, "max residual " + fmt(worst)});
  }
  {
    const auto e = cells::flip_dephase();
    const auto s1 = shape(e, options);
    const auto s2 = product_decomposition(e, e, options).shape();
    const bool ok = s1.dims == std::vector<Index>{1} && period(e) == 2 && s2.dims == std::vector<Index>{1, 1};
    out.push_back({"flip cell: shape (1), period 2, square (1,1)", ok, ""});
  }
  {
    const auto e = cells::phase_spectator(std::numbers::pi / 3);
    const auto a = analyze(e, options);
    const auto& ext = a.spectrum.classification->external;
    bool ok = a.shape.dims == std::vector<Index>{1, 1, 1} && ext.size() == 2;
    for (const auto& x : ext) ok = ok && std::abs(std::abs(std::arg(x.value)) - std::numbers::pi / 3) <= 1e-7;
    out.push_back({"phase cell: shape (1,1,1), external e^{+-i pi/3}", ok, ""});
  }
  {
    const auto e = cells::amplitude_damping(0.5);
    Matrix pk = Matrix::Zero(2, 2);
    pk(1, 1) = 1.0;
    const double mass = residual_mass(e, Matrix::Identity(2, 2) / 2.0, pk, 100);
    out.push_back({"decaying subspace empties under iteration", mass <= 1e-8, "mass " + fmt(mass)});
  }
  {
    bool ok = true;
    std::string detail;
    for (auto [p, q] : {std::pair<Index, Index>{2, 3}, {2, 4}, {3, 3}}) {
      const auto e = cells::shift_dephase(p);
      const auto f = cells::shift_dephase(q);
      const auto states = construct_classical_superactivation(e, f, options);
      const std::size_t fix = fix_dimension_oracle(tensor(e, f));
      ok = ok && states.size() == fix && states.size() == std::gcd(static_cast<std::size_t>(p), static_cast<std::size_t>(q));
      detail += "(" + std::to_string(p) + "," + std::to_string(q) + ")->" + std::to_string(states.size()) + " ";
    }
    out.push_back({"classical activation count equals gcd and the fix dimension", ok, detail});
  }
  {
    std::mt19937_64 rng(seed + 400);
    int bad = 0;
    int positives = 0;
    int pairs = 0;
    while (pairs < 10) {
      const auto e = random_classical_cell(rng);
      const auto f = random_classical_cell(rng);
      const auto ea = analyze(e, options);
      const auto fa = analyze(f, options);
      if (ea.shape.max() != 1 || fa.shape.max() != 1) continue;
      ++pairs;
      const auto v = check_quantum_superactivation(ea, fa);
      const bool truth = product_decomposition(e, f, options).shape().max() >= 2;
      if (v.superactivates != truth) ++bad;
      if (v.superactivates) {
        ++positives;
        const auto w = construct_entangled_stationary(e, ea, f, fa, *v.pair, options.tol);
        if (!w.certificate.entangled || w.stationarity_residual > 1e-8) ++bad;
      }
    }
    out.push_back({"spectral criterion matches the product shape", bad == 0,
                   std::to_string(bad) + " disagreements in 10 pairs, " + std::to_string(positives) + " positive"});
  }
  {
    const auto cell = engineered_qubit_cell();
    const auto dec = structure_decomposition(cell.channel, options);
    std::mt19937_64 rng(seed + 500);
    double worst = 1.0;
    bool addr = true;
    for (int i = 0; i < 5; ++i) {
      const auto payload = DensityOperator::from_matrix(linalg::random_density(2, rng));
      for (const auto& r : round_trip(cell.channel, dec, {0, payload}, {1, 5, 20})) {
        worst = std::min(worst, r.fidelity);
        addr = addr && r.address_recovered;
      }
    }
    out.push_back({"noiseless qubit survives repeated noise", addr && worst >= 1.0 - 1e-8,
                   "worst fidelity " + fmt(worst)});
  }
  return out;
}

}  // namespace memcell::oracle
