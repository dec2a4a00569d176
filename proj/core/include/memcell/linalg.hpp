#pragma once

// Dense linear-algebra helpers shared by the analysis modules.
//
// Operators are vectorized by stacking columns, so vec(A X B) = (B^T kron A) vec(X).
// Every module goes through vec()/unvec() below; nothing else should reshape.

#include <random>
#include <span>
#include <vector>

#include "memcell/types.hpp"

namespace memcell::linalg {

Vector vec(const Matrix& op);
Matrix unvec(const Vector& v, Index dim);

Matrix kron(const Matrix& a, const Matrix& b);
Matrix hermitize(const Matrix& op);
bool is_finite(const Matrix& op);

/// Hilbert-Schmidt inner product tr(a^dag b).
Complex hs_inner(const Matrix& a, const Matrix& b);

/// Orthonormal (Hilbert-Schmidt) basis of span(ops). Singular values below
/// rel_tol * largest are dropped.
std::vector<Matrix> orthonormal_span(std::span<const Matrix> ops, double rel_tol = 1e-9);

/// Orthonormal basis of Hermitian operators for a span that is closed under
/// adjoint. The real dimension of the Hermitian part equals the complex
/// dimension of the span, so the basis size matches orthonormal_span().
std::vector<Matrix> hermitian_basis(std::span<const Matrix> ops, double rel_tol = 1e-9);

/// Right null space of a, as orthonormal columns. A singular value counts as
/// zero when it is <= tol * max(1, largest singular value).
Matrix null_space(const Matrix& a, double tol);

/// Numerical rank with the same convention as null_space().
Index rank(const Matrix& a, double tol);

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;
};
HermitianEigen eigh(const Matrix& herm);

double min_eigenvalue(const Matrix& herm);

/// Columns spanning the eigenvectors of herm with eigenvalue > threshold.
Matrix support_isometry(const Matrix& herm, double threshold);

/// Moore-Penrose inverse of a Hermitian operator, eigenvalues below
/// rel_cutoff * largest treated as zero.
Matrix hermitian_pinv(const Matrix& herm, double rel_cutoff);

Matrix psd_sqrt(const Matrix& herm);

/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2, clamped into [0, 1].
double fidelity(const Matrix& a, const Matrix& b);

/// Unitary factor of the polar decomposition.
Matrix polar_unitary(const Matrix& a);

/// Partial transpose on the second tensor factor of C^da (x) C^db.
Matrix partial_transpose(const Matrix& op, Index da, Index db);

/// Trace over the second tensor factor of C^da (x) C^db.
Matrix partial_trace_second(const Matrix& op, Index da, Index db);

/// Phase of z in [0, 2*pi), with values within snap of 2*pi folded to 0.
double phase(Complex z, double snap = 0.0);

/// Groups unit-circle values whose mutual distance is within tol. Clusters
/// are returned sorted by phase; each value is the normalized mean of its
/// members.
struct CircleCluster {
  Complex value;
  std::vector<Index> members;
};
std::vector<CircleCluster> cluster_on_circle(std::span<const Complex> values, double tol);

/// Groups sorted real values into runs separated by gaps larger than tol.
std::vector<std::vector<Index>> cluster_real(const RealVector& ascending, double tol);

Matrix random_gaussian(Index rows, Index cols, std::mt19937_64& rng);
Matrix random_unitary(Index dim, std::mt19937_64& rng);
/// Random full-rank density operator (Ginibre ensemble).
Matrix random_density(Index dim, std::mt19937_64& rng);

}  // namespace memcell::linalg
