#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace memcell {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Numerical thresholds shared by every analysis. Defaults are the values the
/// library is tested against; all comparisons use the Frobenius norm unless a
/// function says otherwise.
struct Tolerances {
  double cptp = 1e-9;       ///< completeness residual ||sum E^dag E - I||
  double psd = 1e-9;        ///< smallest admissible eigenvalue is -psd
  double eig = 1e-8;        ///< |lambda| >= 1 - eig counts as peripheral
  double cluster = 1e-7;    ///< peripheral values closer than this merge
  double support = 1e-10;   ///< eigenvalues of rho* below this span K
  double pinv = 1e-10;      ///< relative pseudo-inverse cutoff
  double check = 1e-8;      ///< residual accepted by internal self-checks
};

/// Options for routines that draw generic (random) elements.
struct AnalysisOptions {
  Tolerances tol{};
  std::uint64_t seed = 20180930;
  int max_retries = 8;
};

}  // namespace memcell
