#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace hexmpo {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

struct SvdResult {
  Mat u;
  RVec s;
  Mat vh;
};

/// Thin SVD, LAPACK zgesdd with zgesvd fallback.
SvdResult svd(const Mat& a);

/// Thin QR of an m x k matrix with m >= k: q gets orthonormal columns,
/// r the upper-triangular factor.
void qr_thin(const Mat& a, Mat& q, Mat& r);

/// Hermitian eigendecomposition, ascending eigenvalues.
void eigh(const Mat& a, RVec& evals, Mat& evecs);

struct SplitOptions {
  int chi_max = 1 << 30;
  double floor = 1e-14;        // absolute singular-value floor
  double degeneracy_rtol = 1e-12;
};

/// Rank-truncated factorization a ~= left * right with left having exactly
/// orthonormal columns. `kept` holds the retained singular values
/// descending; discarded_sq is the sum of squared discarded singular
/// values and total_sq = |a|_F^2.
struct TruncatedSplit {
  Mat left;    // m x k, isometric columns
  Mat right;   // k x n, equals diag(s) * V^H up to the exact-QR fast path
  RVec kept;
  double discarded_sq = 0.0;
  double total_sq = 0.0;
  bool split_degenerate = false;  // cap fell inside a degenerate multiplet
};

/// Truncated split of a dense matrix.
TruncatedSplit truncated_split(const Mat& a, const SplitOptions& opt);

/// Truncated split of the product x*y without forming it when the through
/// dimension is small; when the through dimension already satisfies the cap
/// the split reduces to a QR of x (no singular values computed, `kept`
/// empty, zero discarded weight).
TruncatedSplit truncated_split_product(const Mat& x, const Mat& y,
                                       const SplitOptions& opt,
                                       bool need_singular_values = false);

}  // namespace hexmpo
