#include "memcell/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "memcell/errors.hpp"
#include "memcell/linalg.hpp"

namespace memcell {

namespace {

constexpr const char* kModule = "spectral";

// Singular values of (M - lambda I) below this (relative to ||M||) count as
// null directions when extracting eigenspaces.
constexpr double kNullTol = 1e-6;

std::string complex_str(Complex z) {
  return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
}

PeripheralEigenvalue eigenspace(const Matrix& m, Index dim, Complex value, std::size_t multiplicity) {
  const Index n = m.rows();
  const Matrix shifted = m - value * Matrix::Identity(n, n);
  const Index k = static_cast<Index>(multiplicity);
  const double scale = std::max(1.0, m.norm());
  // Jacobi rather than divide-and-conquer: Eigen's BDCSVD has returned both
  // wrong small singular values and NaN vectors on these matrices.
  Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix right = svd.matrixV().rightCols(k);
  const Matrix left = svd.matrixU().rightCols(k);
  const double sigma_k = svd.singularValues()(n - k);
  const double residual = std::max((shifted * right).norm(), (left.adjoint() * shifted).norm());
  if (!(sigma_k <= kNullTol * scale && residual <= kNullTol * scale)) {
    throw NumericalError(kModule, "peripheral eigenvalue " + complex_str(value) + " has algebraic multiplicity " +
                                      std::to_string(multiplicity) +
                                      " but a smaller eigenspace (singular value " + std::to_string(sigma_k) +
                                      "); defective peripheral spectrum");
  }
  const Matrix gram = left.adjoint() * right;
  Eigen::JacobiSVD<Matrix> gram_svd(gram);
  const auto& gsv = gram_svd.singularValues();
  if (!(gsv(k - 1) >= 1e-8 * std::max(1.0, gsv(0)))) {
    throw NumericalError(kModule, "left and right eigenspaces of " + complex_str(value) +
                                      " are not in duality; peripheral Jordan block suspected");
  }
  // Duals satisfy dual^dag right = I.
  const Matrix duals = left * gram.inverse().adjoint();

  PeripheralEigenvalue cluster;
  cluster.value = value;
  cluster.multiplicity = multiplicity;
  for (Index j = 0; j < k; ++j) {
    cluster.eigen_operators.push_back(linalg::unvec(right.col(j), dim));
    cluster.dual_operators.push_back(linalg::unvec(duals.col(j), dim));
  }
  return cluster;
}

Matrix project_unit(const PeripheralEigenvalue& unit, const Matrix& x) {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (std::size_t i = 0; i < unit.eigen_operators.size(); ++i) {
    out += linalg::hs_inner(unit.dual_operators[i], x) * unit.eigen_operators[i];
  }
  return out;
}

}  // namespace

std::size_t PeripheralSpectrum::size() const {
  std::size_t total = 0;
  for (const auto& e : eigenvalues) total += e.multiplicity;
  return total;
}

std::vector<SpectrumEntry> PeripheralSpectrum::entries() const {
  std::vector<SpectrumEntry> out;
  out.reserve(eigenvalues.size());
  for (const auto& e : eigenvalues) out.push_back({e.value, e.multiplicity});
  return out;
}

const PeripheralEigenvalue* PeripheralSpectrum::unit() const {
  for (const auto& e : eigenvalues) {
    if (std::abs(e.value - Complex(1.0, 0.0)) <= 1e-6) return &e;
  }
  return nullptr;
}

PeripheralSpectrum peripheral_spectrum(const QuantumChannel& channel, const Tolerances& tol) {
  const Index d = channel.dim();
  const Matrix m = transfer_matrix(channel).matrix;
  Eigen::ComplexEigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError(kModule, "eigensolver failed on the " + std::to_string(m.rows()) + "x" +
                                      std::to_string(m.rows()) + " transfer matrix");
  }
  std::vector<Complex> peripheral;
  for (Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const Complex z = solver.eigenvalues()(i);
    if (std::abs(z) > 1.0 + tol.eig) {
      throw NumericalError(kModule, "transfer matrix has eigenvalue " + complex_str(z) +
                                        " outside the unit disc; input is not a channel");
    }
    if (std::abs(z) >= 1.0 - tol.eig) peripheral.push_back(z);
  }

  PeripheralSpectrum spectrum;
  spectrum.dim = d;
  for (const auto& cluster : linalg::cluster_on_circle(peripheral, tol.cluster)) {
    spectrum.eigenvalues.push_back(eigenspace(m, d, cluster.value, cluster.members.size()));
  }
  if (spectrum.unit() == nullptr) {
    throw NumericalError(kModule, "no eigenvalue 1 found; input is not trace preserving");
  }

  // Peripheral eigen-operators live on the complement of the decaying subspace.
  const DensityOperator rho = maximal_stationary_state(spectrum);
  const Matrix support = linalg::support_isometry(rho.matrix(), tol.support);
  const Matrix proj = support * support.adjoint();
  for (const auto& cluster : spectrum.eigenvalues) {
    for (const auto& x : cluster.eigen_operators) {
      const double leak = (x - proj * x * proj).norm();
      if (leak > 1e-6 * x.norm()) {
        throw NumericalError(kModule, "eigen-operator of " + complex_str(cluster.value) +
                                          " has weight " + std::to_string(leak) +
                                          " on the decaying subspace");
      }
    }
  }
  return spectrum;
}

PeripheralSpectrum tensor_spectrum(const PeripheralSpectrum& a, const PeripheralSpectrum& b,
                                   const Tolerances& tol, bool unit_only) {
  struct Pair {
    std::size_t ia, ib;
  };
  std::vector<Complex> values;
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < a.eigenvalues.size(); ++i)
    for (std::size_t j = 0; j < b.eigenvalues.size(); ++j) {
      values.push_back(a.eigenvalues[i].value * b.eigenvalues[j].value);
      pairs.push_back({i, j});
    }

  PeripheralSpectrum out;
  out.dim = a.dim * b.dim;
  for (const auto& cluster : linalg::cluster_on_circle(values, tol.cluster)) {
    if (unit_only && std::abs(cluster.value - Complex(1.0, 0.0)) > tol.cluster) continue;
    PeripheralEigenvalue merged;
    merged.value = cluster.value;
    for (Index member : cluster.members) {
      const auto& ca = a.eigenvalues[pairs[member].ia];
      const auto& cb = b.eigenvalues[pairs[member].ib];
      merged.multiplicity += ca.multiplicity * cb.multiplicity;
      for (std::size_t x = 0; x < ca.eigen_operators.size(); ++x)
        for (std::size_t y = 0; y < cb.eigen_operators.size(); ++y) {
          merged.eigen_operators.push_back(linalg::kron(ca.eigen_operators[x], cb.eigen_operators[y]));
          merged.dual_operators.push_back(linalg::kron(ca.dual_operators[x], cb.dual_operators[y]));
        }
    }
    out.eigenvalues.push_back(std::move(merged));
  }
  return out;
}

PeripheralSpectrum tensor_power_spectrum(const PeripheralSpectrum& single, int copies,
                                         const Tolerances& tol, bool unit_only) {
  if (copies < 1) throw DomainError(kModule, "tensor power needs at least one copy");
  if (copies == 1) {
    if (!unit_only) return single;
    PeripheralSpectrum out;
    out.dim = single.dim;
    if (const auto* u = single.unit()) out.eigenvalues.push_back(*u);
    return out;
  }
  PeripheralSpectrum acc = single;
  for (int t = 2; t < copies; ++t) acc = tensor_spectrum(acc, single, tol, false);
  return tensor_spectrum(acc, single, tol, unit_only);
}

TransferMatrix spectral_projector(const PeripheralEigenvalue& cluster, Index dim) {
  TransferMatrix p{dim, Matrix::Zero(dim * dim, dim * dim)};
  for (std::size_t i = 0; i < cluster.eigen_operators.size(); ++i) {
    p.matrix.noalias() += linalg::vec(cluster.eigen_operators[i]) * linalg::vec(cluster.dual_operators[i]).adjoint();
  }
  return p;
}

TransferMatrix phase_projection(const PeripheralSpectrum& spectrum) {
  const Index d = spectrum.dim;
  TransferMatrix p{d, Matrix::Zero(d * d, d * d)};
  for (const auto& cluster : spectrum.eigenvalues) p.matrix += spectral_projector(cluster, d).matrix;
  const double idem = (p.matrix * p.matrix - p.matrix).norm();
  if (idem > 1e-8 * std::max(1.0, p.matrix.norm())) {
    throw NumericalError(kModule, "phase projection is not idempotent (residual " + std::to_string(idem) + ")");
  }
  return p;
}

TransferMatrix phase_projection(const QuantumChannel& channel, const Tolerances& tol) {
  return phase_projection(peripheral_spectrum(channel, tol));
}

DensityOperator maximal_stationary_state(const PeripheralSpectrum& spectrum) {
  const auto* unit = spectrum.unit();
  if (unit == nullptr) throw NumericalError(kModule, "spectrum has no eigenvalue 1");
  const Index d = spectrum.dim;
  Matrix rho = linalg::hermitize(project_unit(*unit, Matrix::Identity(d, d) / static_cast<double>(d)));
  const double tr = rho.trace().real();
  if (!(tr > 1e-12)) throw NumericalError(kModule, "stationary projection of I/d has vanishing trace");
  rho /= tr;
  return DensityOperator::from_matrix(rho, 1e-8);
}

DensityOperator maximal_stationary_state(const QuantumChannel& channel, const Tolerances& tol) {
  return maximal_stationary_state(peripheral_spectrum(channel, tol));
}

std::size_t period(const PeripheralSpectrum& spectrum, const Tolerances& tol) {
  const auto* unit = spectrum.unit();
  if (unit == nullptr || unit->multiplicity != 1) {
    throw DomainError(kModule, "period is defined for null cells only (fixed space of dimension " +
                                   std::to_string(unit ? unit->multiplicity : 0) + ")");
  }
  const std::size_t p = spectrum.size();
  if (spectrum.eigenvalues.size() != p) {
    throw NumericalError(kModule, "peripheral eigenvalues of a null cell must be simple");
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t k = 0; k < p; ++k) {
    const Complex root = std::polar(1.0, two_pi * static_cast<double>(k) / static_cast<double>(p));
    if (std::abs(spectrum.eigenvalues[k].value - root) > 10.0 * tol.cluster) {
      throw NumericalError(kModule, "peripheral eigenvalue " + complex_str(spectrum.eigenvalues[k].value) +
                                        " is not the expected root of unity " + complex_str(root));
    }
  }
  return p;
}

std::size_t period(const QuantumChannel& channel, const Tolerances& tol) {
  return period(peripheral_spectrum(channel, tol), tol);
}

CyclicFamily cyclic_states(const QuantumChannel& channel, const Tolerances& tol) {
  return cyclic_states(channel, peripheral_spectrum(channel, tol), tol);
}

CyclicFamily cyclic_states(const QuantumChannel& channel, const PeripheralSpectrum& spectrum,
                           const Tolerances& tol) {
  const std::size_t p = period(spectrum, tol);
  const DensityOperator rho_star = maximal_stationary_state(spectrum);
  CyclicFamily family;
  family.period = p;
  if (p == 1) {
    family.states.push_back(rho_star);
    return family;
  }

  const Matrix support = linalg::support_isometry(rho_star.matrix(), tol.support);
  const Index r = support.cols();
  const Matrix& x1 = spectrum.eigenvalues[1].eigen_operators.front();
  const Matrix rho_s = support.adjoint() * rho_star.matrix() * support;
  Matrix w = support.adjoint() * x1 * support * linalg::hermitian_pinv(rho_s, tol.pinv);
  w /= std::sqrt((w.adjoint() * w).trace().real() / static_cast<double>(r));
  const double unitarity = (w.adjoint() * w - Matrix::Identity(r, r)).norm();
  if (unitarity > 1e-6) {
    throw NumericalError(kModule, "phase operator is not unitary on supp(rho*) (residual " +
                                      std::to_string(unitarity) + ")");
  }

  Eigen::ComplexEigenSolver<Matrix> es(w, false);
  std::vector<Complex> vals(es.eigenvalues().data(), es.eigenvalues().data() + r);
  const auto groups = linalg::cluster_on_circle(vals, 1e-6);
  if (groups.size() != p) {
    throw NumericalError(kModule, "phase operator has " + std::to_string(groups.size()) +
                                      " distinct eigenvalues, expected " + std::to_string(p));
  }

  // W is normal with p distinct eigenvalues, so Lagrange interpolation
  // yields its spectral projectors exactly.
  std::vector<Matrix> projectors;
  for (std::size_t j = 0; j < p; ++j) {
    Matrix proj = Matrix::Identity(r, r);
    for (std::size_t k = 0; k < p; ++k) {
      if (k == j) continue;
      proj = proj * (w - groups[k].value * Matrix::Identity(r, r)) / (groups[j].value - groups[k].value);
    }
    const Matrix full = support * linalg::hermitize(proj) * support.adjoint();
    projectors.push_back(full);
  }
  std::vector<Matrix> blocks;
  for (const auto& proj : projectors) {
    Matrix s = linalg::hermitize(proj * rho_star.matrix() * proj);
    s /= s.trace().real();
    blocks.push_back(std::move(s));
  }

  // Order the blocks by following the channel.
  std::vector<std::size_t> order{0};
  std::vector<bool> used(p, false);
  used[0] = true;
  while (order.size() < p) {
    const Matrix next = channel(blocks[order.back()]);
    std::size_t best = p;
    double best_overlap = -1.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double overlap = (projectors[j] * next).trace().real();
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = j;
      }
    }
    if (used[best] || best_overlap < 1.0 - 1e-6) {
      throw NumericalError(kModule, "channel does not cycle the phase-operator eigenspaces");
    }
    used[best] = true;
    order.push_back(best);
  }

  // Rotation convention: rho_0 is the block with most weight on the
  // lowest-index basis vector that any block touches.
  std::size_t start = 0;
  const Index d = channel.dim();
  for (Index i = 0; i < d; ++i) {
    double best = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double w_ii = blocks[order[j]](i, i).real();
      if (w_ii > best) {
        best = w_ii;
        start = j;
      }
    }
    if (best > 1e-9) break;
  }

  for (std::size_t j = 0; j < p; ++j) {
    family.states.push_back(DensityOperator::from_matrix(blocks[order[(start + j) % p]], 1e-8));
  }

  for (std::size_t j = 0; j < p; ++j) {
    const Matrix image = channel(family.states[j].matrix());
    const double residual = (image - family.states[(j + 1) % p].matrix()).norm();
    if (residual > tol.check * 100.0) {
      throw NumericalError(kModule, "cyclic state " + std::to_string(j) + " is not mapped onto its successor (residual " +
                                        std::to_string(residual) + ")");
    }
  }
  return family;
}

}  // namespace memcell
