#include "hexmpo/linalg.hpp"

#include <algorithm>
#include <stdexcept>

#include <cblas.h>
#include <lapacke.h>

namespace hexmpo {

namespace {

lapack_complex_double* lp(cx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

}  // namespace

void qr_thin(const Mat& a_in, Mat& q, Mat& r) {
  Mat a = a_in;
  const int m = int(a.rows()), k = int(a.cols());
  std::vector<cx> tau(std::min(m, k));
  int info = LAPACKE_zgeqrf(LAPACK_COL_MAJOR, m, k, lp(a.data()), m, lp(tau.data()));
  if (info != 0) throw std::runtime_error("zgeqrf failed");
  r = a.topRows(k).triangularView<Eigen::Upper>();
  info = LAPACKE_zungqr(LAPACK_COL_MAJOR, m, k, k, lp(a.data()), m, lp(tau.data()));
  if (info != 0) throw std::runtime_error("zungqr failed");
  q = a.leftCols(k);
}

namespace {

int keep_count(const RVec& s, const SplitOptions& opt, bool* degenerate) {
  int n = int(s.size());
  int k = 0;
  while (k < n && k < opt.chi_max && s[k] > opt.floor) ++k;
  if (k == 0) k = 1;  // keep a single (possibly null) channel
  *degenerate = false;
  if (k < n && k == opt.chi_max && s[k - 1] > 0.0 &&
      (s[k - 1] - s[k]) <= opt.degeneracy_rtol * s[k - 1])
    *degenerate = true;
  return k;
}

constexpr int kGramThreshold = 512;  // min dimension where the Gram route wins

}  // namespace

SvdResult svd(const Mat& a) {
  const int m = int(a.rows()), n = int(a.cols()), k = std::min(m, n);
  Mat work = a;
  SvdResult out;
  out.u.resize(m, k);
  out.s.resize(k);
  out.vh.resize(k, n);
  int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, lp(work.data()), m,
                            out.s.data(), lp(out.u.data()), m, lp(out.vh.data()), k);
  if (info != 0) {
    work = a;
    std::vector<double> superb(std::max(1, k - 1));
    info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', m, n, lp(work.data()), m,
                          out.s.data(), lp(out.u.data()), m, lp(out.vh.data()), k,
                          superb.data());
    if (info != 0) throw std::runtime_error("SVD did not converge");
  }
  return out;
}

void eigh(const Mat& a, RVec& evals, Mat& evecs) {
  const int n = int(a.rows());
  evecs = a;
  evals.resize(n);
  int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, lp(evecs.data()), n,
                            evals.data());
  if (info != 0) throw std::runtime_error("zheevd failed");
}

namespace {

TruncatedSplit split_via_svd(const Mat& a, const SplitOptions& opt) {
  auto dec = svd(a);
  TruncatedSplit out;
  out.total_sq = dec.s.squaredNorm();
  int k = keep_count(dec.s, opt, &out.split_degenerate);
  out.kept = dec.s.head(k);
  out.discarded_sq = out.total_sq - out.kept.squaredNorm();
  out.left = dec.u.leftCols(k);
  out.right = out.kept.asDiagonal() * dec.vh.topRows(k);
  return out;
}

// Gram-matrix route for large blocks: eigenvectors of a^H a give the right
// singular subspace; the left factor is re-orthonormalized by QR so the
// returned isometry is exact regardless of small-singular-value noise.
TruncatedSplit split_via_gram(const Mat& a, const SplitOptions& opt) {
  const int m = int(a.rows()), n = int(a.cols());
  const bool tall = m >= n;
  const int g = tall ? n : m;
  Mat gram(g, g);
  // gram = a^H a (tall) or a a^H (wide)
  cblas_zherk(CblasColMajor, CblasUpper, tall ? CblasConjTrans : CblasNoTrans, g,
              tall ? m : n, 1.0, a.data(), m, 0.0, gram.data(), g);

  const int want = std::min(opt.chi_max, g);
  RVec evals(g);
  Mat z(g, want);
  std::vector<int> isuppz(2 * std::max(1, want));
  int found = 0;
  int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', g, lp(gram.data()), g,
                            0.0, 0.0, g - want + 1, g, 0.0, &found, evals.data(),
                            lp(z.data()), g, isuppz.data());
  if (info != 0 || found != want) return split_via_svd(a, opt);

  const double total = a.squaredNorm();
  RVec s(want);
  for (int i = 0; i < want; ++i)
    s[i] = std::sqrt(std::max(0.0, evals[want - 1 - i]));
  TruncatedSplit out;
  out.total_sq = total;
  int k = keep_count(s, opt, &out.split_degenerate);
  // Columns of z are ascending; reorder kept ones descending.
  Mat w(g, k);
  for (int i = 0; i < k; ++i) w.col(i) = z.col(want - 1 - i);
  out.kept = s.head(k);
  out.discarded_sq = std::max(0.0, total - out.kept.squaredNorm());
  if (tall) {
    // w spans the kept right-singular subspace: a_trunc = (a w) w^H.
    Mat c = a * w;  // m x k, columns ~ u_i * s_i
    Mat q, r;
    qr_thin(c, q, r);
    out.left = q;
    out.right = r * w.adjoint();
  } else {
    // w spans the kept left-singular subspace: a_trunc = w (w^H a).
    out.left = w;
    out.right = w.adjoint() * a;
  }
  return out;
}

}  // namespace

TruncatedSplit truncated_split(const Mat& a, const SplitOptions& opt) {
  if (std::min(a.rows(), a.cols()) >= kGramThreshold)
    return split_via_gram(a, opt);
  return split_via_svd(a, opt);
}

TruncatedSplit truncated_split_product(const Mat& x, const Mat& y,
                                       const SplitOptions& opt,
                                       bool need_singular_values) {
  const int t = int(x.cols());
  if (t != int(y.rows())) throw std::invalid_argument("split_product: inner mismatch");
  if (!need_singular_values && t <= opt.chi_max && t <= x.rows()) {
    TruncatedSplit out;
    Mat q, r;
    qr_thin(x, q, r);
    out.left = std::move(q);
    out.right = r * y;
    out.total_sq = out.right.squaredNorm();
    out.discarded_sq = 0.0;
    return out;
  }
  if (t < std::min(x.rows(), y.cols()) / 2) {
    // Split through the small inner dimension: QR both sides, SVD the core.
    Mat qx, rx;
    qr_thin(x, qx, rx);
    Mat qyh, ryh;
    qr_thin(y.adjoint(), qyh, ryh);
    auto core = truncated_split(Mat(rx * ryh.adjoint()), opt);
    TruncatedSplit out = std::move(core);
    out.left = qx * out.left;
    out.right = out.right * qyh.adjoint();
    return out;
  }
  return truncated_split(Mat(x * y), opt);
}

}  // namespace hexmpo
