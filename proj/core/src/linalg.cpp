#include "memcell/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

namespace memcell::linalg {

Vector vec(const Matrix& op) {
  return Eigen::Map<const Vector>(op.data(), op.size());
}

Matrix unvec(const Vector& v, Index dim) {
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

Matrix hermitize(const Matrix& op) {
  return (0.5 * (op + op.adjoint())).eval();
}

bool is_finite(const Matrix& op) {
  return op.allFinite();
}

Complex hs_inner(const Matrix& a, const Matrix& b) {
  return (a.adjoint() * b).trace();
}

namespace {

Matrix stack(std::span<const Matrix> ops) {
  const Index n = ops.front().size();
  Matrix cols(n, static_cast<Index>(ops.size()));
  for (std::size_t j = 0; j < ops.size(); ++j) cols.col(static_cast<Index>(j)) = vec(ops[j]);
  return cols;
}

}  // namespace

std::vector<Matrix> orthonormal_span(std::span<const Matrix> ops, double rel_tol) {
  if (ops.empty()) return {};
  const Index dim = ops.front().rows();
  const Matrix cols = stack(ops);
  Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  std::vector<Matrix> basis;
  if (sv.size() == 0 || sv(0) == 0.0) return basis;
  for (Index j = 0; j < sv.size(); ++j) {
    if (sv(j) > rel_tol * sv(0)) basis.push_back(unvec(svd.matrixU().col(j), dim));
  }
  return basis;
}

std::vector<Matrix> hermitian_basis(std::span<const Matrix> ops, double rel_tol) {
  if (ops.empty()) return {};
  const Index dim = ops.front().rows();
  const Index n = dim * dim;
  RealMatrix real_cols(2 * n, 2 * static_cast<Index>(ops.size()));
  const Complex i_unit(0.0, 1.0);
  for (std::size_t j = 0; j < ops.size(); ++j) {
    const Matrix re = hermitize(ops[j]);
    const Matrix im = hermitize(-i_unit * ops[j]);
    const Vector vre = vec(re);
    const Vector vim = vec(im);
    const Index c = 2 * static_cast<Index>(j);
    real_cols.col(c) << vre.real(), vre.imag();
    real_cols.col(c + 1) << vim.real(), vim.imag();
  }
  Eigen::JacobiSVD<RealMatrix> svd(real_cols, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  std::vector<Matrix> basis;
  if (sv.size() == 0 || sv(0) == 0.0) return basis;
  for (Index j = 0; j < sv.size(); ++j) {
    if (sv(j) <= rel_tol * sv(0)) continue;
    Vector v(n);
    v.real() = svd.matrixU().col(j).head(n);
    v.imag() = svd.matrixU().col(j).tail(n);
    basis.push_back(hermitize(unvec(v, dim)));
  }
  return basis;
}

Matrix null_space(const Matrix& a, double tol) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double scale = std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Index r = 0;
  while (r < sv.size() && sv(r) > tol * scale) ++r;
  return svd.matrixV().rightCols(a.cols() - r);
}

Index rank(const Matrix& a, double tol) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  const double scale = std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Index r = 0;
  while (r < sv.size() && sv(r) > tol * scale) ++r;
  return r;
}

HermitianEigen eigh(const Matrix& herm) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(herm));
  return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const Matrix& herm) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(herm), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Matrix support_isometry(const Matrix& herm, double threshold) {
  const auto es = eigh(herm);
  std::vector<Index> keep;
  // Descending eigenvalue order gives a stable, deterministic column layout.
  for (Index j = es.values.size() - 1; j >= 0; --j) {
    if (es.values(j) > threshold) keep.push_back(j);
  }
  Matrix iso(herm.rows(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) iso.col(static_cast<Index>(c)) = es.vectors.col(keep[c]);
  return iso;
}

Matrix hermitian_pinv(const Matrix& herm, double rel_cutoff) {
  const auto es = eigh(herm);
  const double largest = es.values.cwiseAbs().maxCoeff();
  RealVector inv = RealVector::Zero(es.values.size());
  for (Index j = 0; j < es.values.size(); ++j) {
    if (std::abs(es.values(j)) > rel_cutoff * largest) inv(j) = 1.0 / es.values(j);
  }
  return es.vectors * inv.asDiagonal() * es.vectors.adjoint();
}

Matrix psd_sqrt(const Matrix& herm) {
  const auto es = eigh(herm);
  const RealVector root = es.values.cwiseMax(0.0).cwiseSqrt();
  return es.vectors * root.asDiagonal() * es.vectors.adjoint();
}

double fidelity(const Matrix& a, const Matrix& b) {
  const Matrix sa = psd_sqrt(a);
  const Matrix inner = hermitize(sa * b * sa);
  Eigen::SelfAdjointEigenSolver<Matrix> es(inner, Eigen::EigenvaluesOnly);
  const double root_sum = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

Matrix polar_unitary(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Matrix partial_transpose(const Matrix& op, Index da, Index db) {
  Matrix out(op.rows(), op.cols());
  for (Index a = 0; a < da; ++a)
    for (Index ap = 0; ap < da; ++ap)
      for (Index b = 0; b < db; ++b)
        for (Index bp = 0; bp < db; ++bp)
          out(a * db + b, ap * db + bp) = op(a * db + bp, ap * db + b);
  return out;
}

Matrix partial_trace_second(const Matrix& op, Index da, Index db) {
  Matrix out = Matrix::Zero(da, da);
  for (Index a = 0; a < da; ++a)
    for (Index ap = 0; ap < da; ++ap)
      for (Index b = 0; b < db; ++b) out(a, ap) += op(a * db + b, ap * db + b);
  return out;
}

double phase(Complex z, double snap) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double p = std::arg(z);
  if (p < 0.0) p += two_pi;
  if (two_pi - p <= snap || p >= two_pi) p = 0.0;
  return p;
}

std::vector<CircleCluster> cluster_on_circle(std::span<const Complex> values, double tol) {
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return phase(values[a], tol) < phase(values[b], tol);
  });

  std::vector<std::vector<Index>> groups;
  for (Index idx : order) {
    if (!groups.empty() && std::abs(values[idx] - values[groups.back().back()]) <= tol) {
      groups.back().push_back(idx);
    } else {
      groups.push_back({idx});
    }
  }
  // The sort is linear in phase; the circle closes between the last and first group.
  if (groups.size() > 1 &&
      std::abs(values[groups.back().back()] - values[groups.front().front()]) <= tol) {
    auto tail = std::move(groups.back());
    groups.pop_back();
    groups.front().insert(groups.front().begin(), tail.begin(), tail.end());
  }

  std::vector<CircleCluster> clusters;
  for (auto& g : groups) {
    Complex mean = 0.0;
    for (Index idx : g) mean += values[idx];
    mean /= static_cast<double>(g.size());
    const double mag = std::abs(mean);
    std::sort(g.begin(), g.end());
    clusters.push_back({mag > 0.0 ? mean / mag : mean, std::move(g)});
  }
  std::stable_sort(clusters.begin(), clusters.end(), [&](const auto& a, const auto& b) {
    return phase(a.value, tol) < phase(b.value, tol);
  });
  return clusters;
}

std::vector<std::vector<Index>> cluster_real(const RealVector& ascending, double tol) {
  std::vector<std::vector<Index>> runs;
  for (Index j = 0; j < ascending.size(); ++j) {
    if (runs.empty() || ascending(j) - ascending(runs.back().back()) > tol) {
      runs.push_back({j});
    } else {
      runs.back().push_back(j);
    }
  }
  return runs;
}

Matrix random_gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  return g;
}

Matrix random_unitary(Index dim, std::mt19937_64& rng) {
  const Matrix g = random_gaussian(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

Matrix random_density(Index dim, std::mt19937_64& rng) {
  const Matrix g = random_gaussian(dim, dim, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitize(rho);
}

}  // namespace memcell::linalg
