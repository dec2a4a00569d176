#include "memcell/fixpoint.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "memcell/errors.hpp"
#include "memcell/linalg.hpp"

namespace memcell {

namespace {

constexpr const char* kModule = "fixpoint";

// Relative gap below which eigenvalues of a generic element are taken equal.
constexpr double kGenericTol = 1e-6;

struct Draft {
  Matrix isometry;  // columns in C^n, n = rank of rho*; minimal projections side by side
  Index d = 0;
  Index m = 0;
  Matrix factorization;
  Matrix sigma;
};

// Signals a generic draw that happened to be degenerate; the caller retries.
struct Degenerate {
  std::string reason;
};

std::vector<double> gaussians(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) x = normal(rng);
  return out;
}

// Generic element of span(gens) with complex Gaussian coefficients.
Matrix generic(const std::vector<Matrix>& gens, std::mt19937_64& rng) {
  const auto re = gaussians(gens.size(), rng);
  const auto im = gaussians(gens.size(), rng);
  Matrix out = Matrix::Zero(gens.front().rows(), gens.front().cols());
  for (std::size_t i = 0; i < gens.size(); ++i) out += Complex(re[i], im[i]) * gens[i];
  return out;
}

Matrix columns(const Matrix& m, const std::vector<Index>& idx) {
  Matrix out(m.rows(), static_cast<Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) out.col(static_cast<Index>(c)) = m.col(idx[c]);
  return out;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

// Splits a *-algebra, given by a spanning set closed under adjoint, into
// full matrix blocks. The eigenspaces of a generic Hermitian element are the
// minimal projections; a generic element links two of them iff they belong
// to the same block.
std::vector<Draft> decompose_algebra(const std::vector<Matrix>& gens, const Matrix& rho, std::mt19937_64& rng) {
  const Matrix g = linalg::hermitize(generic(gens, rng));
  const Matrix probe = linalg::hermitize(generic(gens, rng));
  const Matrix x = generic(gens, rng);
  const double gscale = std::max(g.norm(), 1e-300);

  const auto eg = linalg::eigh(g);
  const auto levels = linalg::cluster_real(eg.values, kGenericTol * gscale);
  std::vector<Matrix> pieces;
  for (const auto& l : levels) {
    Matrix q = columns(eg.vectors, l);
    const Matrix local = q.adjoint() * probe * q;
    const Complex mean = local.trace() / static_cast<double>(q.cols());
    if ((local - mean * Matrix::Identity(q.cols(), q.cols())).norm() > kGenericTol * std::max(1.0, probe.norm())) {
      throw Degenerate{"degenerate generic element: an eigenspace of the generic element is not a minimal projection"};
    }
    pieces.push_back(std::move(q));
  }

  const double link_tol = kGenericTol * std::max(x.norm(), 1e-300);
  std::vector<std::size_t> parent(pieces.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      if ((pieces[i].adjoint() * x * pieces[j]).norm() > link_tol) parent[find_root(parent, j)] = find_root(parent, i);
    }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> group_of(pieces.size(), pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::size_t r = find_root(parent, i);
    if (group_of[r] == pieces.size()) {
      group_of[r] = groups.size();
      groups.emplace_back();
    }
    groups[group_of[r]].push_back(i);
  }

  std::vector<Draft> drafts;
  for (const auto& grp : groups) {
    const Index d = static_cast<Index>(grp.size());
    const Index m = pieces[grp.front()].cols();
    for (std::size_t i : grp) {
      if (pieces[i].cols() != m) {
        throw Degenerate{"degenerate generic element: linked minimal projections differ in rank"};
      }
    }
    const Index nk = d * m;
    Matrix w(rho.rows(), nk);
    for (Index i = 0; i < d; ++i) w.middleCols(i * m, m) = pieces[grp[static_cast<std::size_t>(i)]];

    // Matrix units: rotate each minimal projection onto the first one.
    Matrix f = Matrix::Zero(nk, nk);
    f.topLeftCorner(m, m) = Matrix::Identity(m, m);
    const Matrix& q1 = pieces[grp.front()];
    for (Index i = 1; i < d; ++i) {
      const Matrix& qi = pieces[grp[static_cast<std::size_t>(i)]];
      const Matrix link = qi.adjoint() * x * q1;
      Eigen::JacobiSVD<Matrix> lsv(link);
      if (lsv.singularValues()(m - 1) < link_tol) {
        throw Degenerate{"degenerate generic element: matrix-unit link is singular"};
      }
      f.block(i * m, i * m, m, m) = linalg::polar_unitary(link);
    }

    const Matrix frame = w * f;
    for (const Matrix* h : {&g, &probe, &x}) {
      const Matrix b = frame.adjoint() * (*h) * frame;
      Matrix y(d, d);
      for (Index p = 0; p < d; ++p)
        for (Index q = 0; q < d; ++q) y(p, q) = b.block(p * m, q * m, m, m).trace() / static_cast<double>(m);
      if ((b - linalg::kron(y, Matrix::Identity(m, m))).norm() > 1e-7 * std::max(1.0, h->norm())) {
        throw NumericalError(kModule, "sector factorization does not bring the algebra to M_d (x) I_m");
      }
    }

    const Matrix local = frame.adjoint() * rho * frame;
    Matrix sigma = linalg::hermitize(local.topLeftCorner(m, m));
    sigma /= sigma.trace().real();
    if (linalg::min_eigenvalue(sigma) <= 0.0) {
      throw NumericalError(kModule, "noise state of a sector is singular");
    }
    drafts.push_back({w, d, m, f, sigma});
  }
  return drafts;
}

// Orthonormal Hermitian basis of B(C^d) (x) sigma embedded through each sector.
std::vector<Matrix> sector_fix_basis(const std::vector<Sector>& sectors) {
  std::vector<Matrix> basis;
  const double r = 1.0 / std::sqrt(2.0);
  for (const auto& s : sectors) {
    const Matrix e = s.embedding();
    const Matrix& sg = s.sigma.matrix();
    const double norm = sg.norm();
    const auto push = [&](const Matrix& h) {
      basis.push_back(linalg::hermitize(e * linalg::kron(h, sg) * e.adjoint()) / norm);
    };
    for (Index a = 0; a < s.d; ++a) {
      Matrix h = Matrix::Zero(s.d, s.d);
      h(a, a) = 1.0;
      push(h);
      for (Index b = a + 1; b < s.d; ++b) {
        Matrix sym = Matrix::Zero(s.d, s.d);
        sym(a, b) = r;
        sym(b, a) = r;
        push(sym);
        Matrix asym = Matrix::Zero(s.d, s.d);
        asym(a, b) = Complex(0.0, -r);
        asym(b, a) = Complex(0.0, r);
        push(asym);
      }
    }
  }
  return basis;
}

// Descending d, descending m, then projector entries with larger first.
bool sector_before(const Sector& a, const Sector& b) {
  if (a.d != b.d) return a.d > b.d;
  if (a.m != b.m) return a.m > b.m;
  const Matrix pa = a.projector();
  const Matrix pb = b.projector();
  for (Index j = 0; j < pa.cols(); ++j)
    for (Index i = 0; i < pa.rows(); ++i) {
      const Complex u = pa(i, j);
      const Complex v = pb(i, j);
      if (std::abs(u.real() - v.real()) > 1e-9) return u.real() > v.real();
      if (std::abs(u.imag() - v.imag()) > 1e-9) return u.imag() > v.imag();
    }
  return false;
}

void verify(const StructureDecomposition& dec, const MapAction& map, const PeripheralEigenvalue& unit,
            std::mt19937_64& rng) {
  for (const auto& s : dec.sectors) {
    const Matrix ref = s.reference_state();
    const double drift = (map.forward(ref) - ref).norm();
    if (drift > 1e-6) {
      throw NumericalError(kModule, "reference state of sector " + std::to_string(s.index) +
                                        " is not stationary (residual " + std::to_string(drift) + ")");
    }
  }
  // A generic fixed point must lie in the span of the sector basis.
  std::vector<Matrix> normalized;
  for (const auto& op : unit.eigen_operators) normalized.push_back(op / op.norm());
  const Matrix x = generic(normalized, rng);
  Matrix projected = Matrix::Zero(dec.dim, dec.dim);
  for (const auto& b : dec.fix_basis) projected += linalg::hs_inner(b, x) * b;
  const double err = (projected - x).norm();
  if (err > 1e-6 * std::max(1.0, x.norm())) {
    throw NumericalError(kModule, "fixed point does not have the block form of the decomposition (residual " +
                                      std::to_string(err) + ")");
  }
}

}  // namespace

Matrix Sector::projector() const {
  return sector_isometry * sector_isometry.adjoint();
}

Matrix Sector::embedding() const {
  return sector_isometry * factorization;
}

Matrix Sector::reference_state() const {
  const Matrix e = embedding();
  const Matrix local = linalg::kron(Matrix::Identity(d, d) / static_cast<double>(d), sigma.matrix());
  return linalg::hermitize(e * local * e.adjoint());
}

Index Shape::max() const {
  return dims.empty() ? 0 : *std::max_element(dims.begin(), dims.end());
}

Shape StructureDecomposition::shape() const {
  Shape s;
  for (const auto& sec : sectors) s.dims.push_back(sec.d);
  std::sort(s.dims.begin(), s.dims.end(), std::greater<>());
  return s;
}

std::vector<Matrix> fixed_point_space(const PeripheralSpectrum& spectrum) {
  const auto* unit = spectrum.unit();
  if (unit == nullptr) throw NumericalError(kModule, "spectrum has no eigenvalue 1");
  auto basis = linalg::hermitian_basis(linalg::orthonormal_span(unit->eigen_operators, 1e-8), 1e-6);
  if (basis.size() != unit->multiplicity) {
    throw NumericalError(kModule, "fixed space is not closed under adjoint (" + std::to_string(basis.size()) +
                                      " Hermitian directions for multiplicity " +
                                      std::to_string(unit->multiplicity) + ")");
  }
  return basis;
}

std::vector<Matrix> fixed_point_space(const QuantumChannel& channel, const Tolerances& tol) {
  return fixed_point_space(peripheral_spectrum(channel, tol));
}

StructureDecomposition structure_decomposition(const QuantumChannel& channel, const AnalysisOptions& options) {
  return structure_decomposition(action_of(channel), peripheral_spectrum(channel, options.tol), options);
}

StructureDecomposition structure_decomposition(const MapAction& map, const PeripheralSpectrum& spectrum,
                                               const AnalysisOptions& options) {
  const auto* unit = spectrum.unit();
  if (unit == nullptr) throw NumericalError(kModule, "spectrum has no eigenvalue 1");
  const Index dim = map.dim;
  const DensityOperator rho_star = maximal_stationary_state(spectrum);
  const Matrix v = linalg::support_isometry(rho_star.matrix(), options.tol.support);
  const Matrix rho = v.adjoint() * rho_star.matrix() * v;

  // Heisenberg fixed points restricted to supp(rho*) form a *-algebra.
  std::vector<Matrix> gens;
  for (const auto& l : unit->dual_operators) {
    Matrix c = v.adjoint() * l * v;
    const double n = c.norm();
    if (n > 1e-12) gens.push_back(c / n);
  }
  if (gens.empty()) throw NumericalError(kModule, "fixed algebra vanishes on the support of rho*");
  {
    std::mt19937_64 rng(options.seed);
    const Matrix z = generic(gens, rng);
    const Matrix image = v.adjoint() * map.adjoint(v * z * v.adjoint()) * v;
    const double drift = (image - z).norm();
    if (drift > 1e-7 * std::max(1.0, z.norm())) {
      throw NumericalError(kModule, "compressed fixed algebra is not invariant under the Heisenberg map (residual " +
                                        std::to_string(drift) + ")");
    }
  }

  std::string last_reason;
  for (int attempt = 0; attempt < std::max(1, options.max_retries); ++attempt) {
    const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(attempt);
    std::mt19937_64 rng(seed);
    std::vector<Draft> drafts;
    try {
      drafts = decompose_algebra(gens, rho, rng);
    } catch (const Degenerate& deg) {
      last_reason = deg.reason;
      continue;
    }

    Index total = 0;
    for (const auto& dr : drafts) total += dr.d * dr.d;
    if (static_cast<std::size_t>(total) != unit->multiplicity) {
      last_reason = "sum of d_k^2 is " + std::to_string(total) + " but the fixed space has dimension " +
                    std::to_string(unit->multiplicity);
      continue;
    }

    StructureDecomposition dec;
    dec.dim = dim;
    dec.seed_used = seed;
    dec.attempts = attempt + 1;
    dec.decaying_projector = Matrix::Identity(dim, dim) - v * v.adjoint();
    for (auto& dr : drafts) {
      dec.sectors.push_back(Sector{0, v * dr.isometry, dr.d, dr.m, DensityOperator::from_matrix(dr.sigma, 1e-8),
                                   std::move(dr.factorization)});
    }
    std::stable_sort(dec.sectors.begin(), dec.sectors.end(), sector_before);
    for (std::size_t k = 0; k < dec.sectors.size(); ++k) dec.sectors[k].index = k;
    dec.fix_basis = sector_fix_basis(dec.sectors);
    verify(dec, map, *unit, rng);
    return dec;
  }
  throw NumericalError(kModule, last_reason + " after " + std::to_string(std::max(1, options.max_retries)) +
                                    " attempts");
}

Shape shape(const QuantumChannel& channel, const AnalysisOptions& options) {
  return structure_decomposition(channel, options).shape();
}

PeripheralSpectrum classify_eigenvalues(const QuantumChannel& channel, PeripheralSpectrum spectrum,
                                        const StructureDecomposition& decomposition, const Tolerances& tol) {
  constexpr double match_tol = 1e-6;
  SpectrumClassification cls;
  std::vector<std::size_t> remaining;
  for (const auto& e : spectrum.eigenvalues) remaining.push_back(e.multiplicity);

  for (const auto& sector : decomposition.sectors) {
    const auto local = peripheral_spectrum(compress(channel, sector.sector_isometry), tol);
    std::vector<SpectrumEntry> internal = local.entries();
    for (const auto& entry : internal) {
      std::size_t hit = spectrum.eigenvalues.size();
      for (std::size_t j = 0; j < spectrum.eigenvalues.size(); ++j) {
        if (std::abs(spectrum.eigenvalues[j].value - entry.value) <= match_tol) hit = j;
      }
      if (hit == spectrum.eigenvalues.size() || remaining[hit] < entry.multiplicity) {
        throw NumericalError(kModule, "internal eigenvalue (" + std::to_string(entry.value.real()) + ", " +
                                          std::to_string(entry.value.imag()) + ") of sector " +
                                          std::to_string(sector.index) +
                                          " is missing from the peripheral spectrum; check tolerances");
      }
      remaining[hit] -= entry.multiplicity;
    }
    cls.internal.push_back(std::move(internal));
  }
  for (std::size_t j = 0; j < spectrum.eigenvalues.size(); ++j) {
    if (remaining[j] > 0) cls.external.push_back({spectrum.eigenvalues[j].value, remaining[j]});
  }
  spectrum.classification = std::move(cls);
  return spectrum;
}

PeripheralSpectrum classify_eigenvalues(const QuantumChannel& channel, const AnalysisOptions& options) {
  auto spectrum = peripheral_spectrum(channel, options.tol);
  const auto dec = structure_decomposition(action_of(channel), spectrum, options);
  return classify_eigenvalues(channel, std::move(spectrum), dec, options.tol);
}

CellAnalysis analyze(const QuantumChannel& channel, const AnalysisOptions& options) {
  auto spectrum = peripheral_spectrum(channel, options.tol);
  auto dec = structure_decomposition(action_of(channel), spectrum, options);
  spectrum = classify_eigenvalues(channel, std::move(spectrum), dec, options.tol);
  CellAnalysis out{std::move(spectrum), std::move(dec), {}, std::nullopt};
  out.shape = out.structure.shape();
  if (out.shape.dims == std::vector<Index>{1}) out.cyclic = cyclic_states(channel, out.spectrum, options.tol);
  return out;
}

}  // namespace memcell
