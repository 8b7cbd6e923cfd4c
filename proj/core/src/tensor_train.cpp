#include "hexmpo/tensor_train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace hexmpo {

namespace {

constexpr double kExactDiscard = 1e-26;  // below this the fit is already exact

Mat adjoint_copy(const Mat& m) { return m.adjoint(); }

}  // namespace

Tensor3 Tensor3::from_matrix_lf(const Mat& m, int dl, int d, int dr) {
  if (m.rows() != Eigen::Index(dl) * d || m.cols() != dr)
    throw std::invalid_argument("from_matrix_lf: shape mismatch");
  Tensor3 t(dl, d, dr);
  Eigen::Map<Mat>(t.v.data(), m.rows(), m.cols()) = m;
  return t;
}

Tensor3 Tensor3::from_matrix_rf(const Mat& m, int dl, int d, int dr) {
  if (m.rows() != dl || m.cols() != Eigen::Index(d) * dr)
    throw std::invalid_argument("from_matrix_rf: shape mismatch");
  Tensor3 t(dl, d, dr);
  Eigen::Map<Mat>(t.v.data(), m.rows(), m.cols()) = m;
  return t;
}

MpoTensor MpoTensor::identity(int d) {
  MpoTensor w(1, d, 1);
  for (int p = 0; p < d; ++p) w.at(0, p, p, 0) = 1.0;
  return w;
}

std::vector<int> TensorTrain::bond_dims() const {
  std::vector<int> dims;
  dims.push_back(sites.empty() ? 1 : sites.front().dl);
  for (const auto& s : sites) dims.push_back(s.dr);
  return dims;
}

int TensorTrain::max_bond() const {
  int m = 1;
  for (const auto& s : sites) m = std::max({m, s.dl, s.dr});
  return m;
}

void TensorTrain::check_consistent() const {
  if (sites.empty()) throw std::invalid_argument("empty tensor train");
  if (sites.front().dl != 1 || sites.back().dr != 1)
    throw std::invalid_argument("boundary bond dims must be 1");
  for (int k = 0; k < size(); ++k) {
    if (sites[k].d != phys_dim)
      throw std::invalid_argument("non-uniform physical dimension");
    if (k + 1 < size() && sites[k].dr != sites[k + 1].dl)
      throw std::invalid_argument("bond dimension mismatch");
  }
}

TensorTrain TensorTrain::product(const std::vector<Vec>& site_vectors) {
  TensorTrain tt;
  if (site_vectors.empty()) throw std::invalid_argument("empty product state");
  tt.phys_dim = int(site_vectors.front().size());
  for (const auto& w : site_vectors) {
    Tensor3 t(1, int(w.size()), 1);
    for (int p = 0; p < int(w.size()); ++p) t.at(0, p, 0) = w[p];
    tt.sites.push_back(std::move(t));
  }
  tt.canonical_center = 0;
  return tt;
}

TensorTrain TensorTrain::all_up(int n) {
  Vec up(2);
  up << 1.0, 0.0;
  return product(std::vector<Vec>(n, up));
}

Vec vectorize_op2(const Mat& o) {
  Vec v(4);
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) v[2 * s + sp] = o(s, sp);
  return v;
}

TensorTrain TensorTrain::from_pauli(const PauliString& p) {
  static const Mat sig[4] = {
      (Mat(2, 2) << 1, 0, 0, 1).finished(),
      (Mat(2, 2) << 0, 1, 1, 0).finished(),
      (Mat(2, 2) << 0, cx(0, -1), cx(0, 1), 0).finished(),
      (Mat(2, 2) << 1, 0, 0, -1).finished()};
  const int n = p.size();
  if (n == 0) throw std::invalid_argument("empty pauli string");
  std::vector<Vec> vecs;
  vecs.reserve(n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    vecs.push_back(vectorize_op2(sig[int(p.letters[i])]) * inv_sqrt2);
  vecs[0] *= p.phase();
  auto tt = product(vecs);
  tt.phys_dim = 4;
  tt.log_norm = 0.5 * n * std::log(2.0);
  return tt;
}

void canonicalize(TensorTrain& tt, int center) {
  tt.check_consistent();
  const int n = tt.size();
  if (center < 0 || center >= n)
    throw std::invalid_argument("canonicalize: center out of range");
  // left-orthonormalize sites [0, center)
  for (int k = 0; k < center; ++k) {
    auto& t = tt.sites[k];
    Mat m = t.lf();
    Mat q, carry;
    if (m.rows() >= m.cols()) {
      qr_thin(m, q, carry);
    } else {  // wide: rank-limited by rows, fall back to SVD
      auto dec = svd(m);
      q = dec.u;
      carry = dec.s.asDiagonal() * dec.vh;
    }
    int r = int(q.cols());
    tt.sites[k] = Tensor3::from_matrix_lf(q, t.dl, t.d, r);
    auto& nxt = tt.sites[k + 1];
    Mat nm = carry * nxt.rf();
    tt.sites[k + 1] = Tensor3::from_matrix_rf(nm, r, nxt.d, nxt.dr);
  }
  for (int k = n - 1; k > center; --k) {
    auto& t = tt.sites[k];
    Mat mh = t.rf().adjoint();  // (d*dr) x dl
    Mat q, carry;
    if (mh.rows() >= mh.cols()) {
      qr_thin(mh, q, carry);
    } else {
      auto dec = svd(mh);
      q = dec.u;
      carry = dec.s.asDiagonal() * dec.vh;
    }
    int r = int(q.cols());
    tt.sites[k] = Tensor3::from_matrix_rf(Mat(q.adjoint()), r, t.d, t.dr);
    auto& prv = tt.sites[k - 1];
    Mat pm = prv.lf() * Mat(carry.adjoint());
    tt.sites[k - 1] = Tensor3::from_matrix_lf(pm, prv.dl, prv.d, r);
  }
  tt.canonical_center = center;
}

TensorTrain apply_layer(const TensorTrain& tt, const CompiledLayer& layer) {
  tt.check_consistent();
  if (int(layer.tensors.size()) != tt.size())
    throw std::invalid_argument("apply_layer: length mismatch");
  if (layer.phys_dim != tt.phys_dim)
    throw std::invalid_argument("apply_layer: physical dimension mismatch");
  TensorTrain out;
  out.phys_dim = tt.phys_dim;
  out.log_norm = tt.log_norm;
  const int d = tt.phys_dim;
  for (int k = 0; k < tt.size(); ++k) {
    const auto& a = tt.sites[k];
    const auto& w = layer.tensors[k];
    Tensor3 c(a.dl * w.wl, d, a.dr * w.wr);
    for (int po = 0; po < d; ++po) {
      Eigen::Map<Mat, 0, Eigen::OuterStride<>> cs(
          c.v.data() + size_t(c.dl) * po, c.dl, c.dr,
          Eigen::OuterStride<>(Eigen::Index(c.dl) * d));
      for (int pi = 0; pi < d; ++pi) {
        auto as = a.slice(pi);
        for (int wl = 0; wl < w.wl; ++wl)
          for (int wr = 0; wr < w.wr; ++wr) {
            cx coef = w.at(wl, po, pi, wr);
            if (coef == cx(0, 0)) continue;
            cs.block(a.dl * wl, a.dr * wr, a.dl, a.dr) += coef * as;
          }
      }
    }
    out.sites.push_back(std::move(c));
  }
  out.canonical_center.reset();
  return out;
}

// ---------------------------------------------------------------------------
// Variational fit machinery. The reference is base with an optional layer
// applied lazily; bond environments fuse reference indices as
// (base + base_dim * w).
// ---------------------------------------------------------------------------

namespace {

struct RefView {
  const TensorTrain* base = nullptr;
  const CompiledLayer* layer = nullptr;

  int n() const { return base->size(); }
  int d() const { return base->phys_dim; }
  int wl(int k) const { return layer ? layer->tensors[k].wl : 1; }
  int wr(int k) const { return layer ? layer->tensors[k].wr : 1; }
  cx w(int k, int a, int po, int pi, int b) const {
    if (layer) return layer->tensors[k].at(a, po, pi, b);
    return po == pi && a == 0 && b == 0 ? cx(1, 0) : cx(0, 0);
  }
};

// L[k+1] = sum conj(T_k) . W_k . B_k . L[k]; L[k] is (chiT x (chiB*W)).
Mat env_left_step(const Mat& L, const Tensor3& t, const RefView& ref, int k) {
  const auto& tb = ref.base->sites[k];
  const int d = ref.d(), Wl = ref.wl(k), Wr = ref.wr(k);
  const int cn = int(L.rows());
  Mat H = Mat::Zero(Eigen::Index(cn) * d, Eigen::Index(tb.dr) * Wr);
  for (int a = 0; a < Wl; ++a)
    for (int pi = 0; pi < d; ++pi) {
      Mat G = L.middleCols(Eigen::Index(tb.dl) * a, tb.dl) * tb.slice(pi);
      for (int po = 0; po < d; ++po)
        for (int b = 0; b < Wr; ++b) {
          cx coef = ref.w(k, a, po, pi, b);
          if (coef == cx(0, 0)) continue;
          H.block(Eigen::Index(cn) * po, Eigen::Index(tb.dr) * b, cn, tb.dr) +=
              coef * G;
        }
    }
  return t.lf().adjoint() * H;
}

// R[k] = B_k . W_k . conj(T_k) . R[k+1]; R[k] is ((chiB*W) x chiT).
Mat env_right_step(const Mat& R, const Tensor3& t, const RefView& ref, int k) {
  const auto& tb = ref.base->sites[k];
  const int d = ref.d(), Wl = ref.wl(k), Wr = ref.wr(k);
  const int cnr = int(R.cols());
  Mat H = Mat::Zero(Eigen::Index(tb.dl) * Wl, Eigen::Index(cnr) * d);
  for (int b = 0; b < Wr; ++b)
    for (int pi = 0; pi < d; ++pi) {
      Mat G = tb.slice(pi) * R.middleRows(Eigen::Index(tb.dr) * b, tb.dr);
      for (int po = 0; po < d; ++po)
        for (int a = 0; a < Wl; ++a) {
          cx coef = ref.w(k, a, po, pi, b);
          if (coef == cx(0, 0)) continue;
          H.block(Eigen::Index(tb.dl) * a, Eigen::Index(cnr) * po, tb.dl, cnr) +=
              coef * G;
        }
    }
  // X[(n' + cn'*po), n] = conj(t[n, po, n'])
  Mat X(Eigen::Index(t.dr) * d, t.dl);
  for (int po = 0; po < d; ++po)
    X.middleRows(Eigen::Index(t.dr) * po, t.dr) = t.slice(po).transpose().conjugate();
  return H * X;
}

// P[(n + cn*p1), (bm + Bm*wm)] : left half of the projected two-site block.
Mat proj_left(const Mat& L, const RefView& ref, int k) {
  const auto& tb = ref.base->sites[k];
  const int d = ref.d(), Wl = ref.wl(k), Wr = ref.wr(k);
  const int cn = int(L.rows());
  Mat P = Mat::Zero(Eigen::Index(cn) * d, Eigen::Index(tb.dr) * Wr);
  for (int a = 0; a < Wl; ++a)
    for (int pi = 0; pi < d; ++pi) {
      Mat G = L.middleCols(Eigen::Index(tb.dl) * a, tb.dl) * tb.slice(pi);
      for (int p1 = 0; p1 < d; ++p1)
        for (int b = 0; b < Wr; ++b) {
          cx coef = ref.w(k, a, p1, pi, b);
          if (coef == cx(0, 0)) continue;
          P.block(Eigen::Index(cn) * p1, Eigen::Index(tb.dr) * b, cn, tb.dr) +=
              coef * G;
        }
    }
  return P;
}

// Q[(bm + Bm*wm), (nr + cnr*p2)] : right half; note the column fusing has p2
// slow so blocks stay contiguous.
Mat proj_right(const Mat& R, const RefView& ref, int k) {
  const auto& tb = ref.base->sites[k];
  const int d = ref.d(), Wl = ref.wl(k), Wr = ref.wr(k);
  const int cnr = int(R.cols());
  Mat Q = Mat::Zero(Eigen::Index(tb.dl) * Wl, Eigen::Index(cnr) * d);
  for (int b = 0; b < Wr; ++b)
    for (int pi = 0; pi < d; ++pi) {
      Mat G = tb.slice(pi) * R.middleRows(Eigen::Index(tb.dr) * b, tb.dr);
      for (int p2 = 0; p2 < d; ++p2)
        for (int a = 0; a < Wl; ++a) {
          cx coef = ref.w(k, a, p2, pi, b);
          if (coef == cx(0, 0)) continue;
          Q.block(Eigen::Index(tb.dl) * a, Eigen::Index(cnr) * p2, tb.dl, cnr) +=
              coef * G;
        }
    }
  return Q;
}

// Tensor from the right factor of a split where columns fuse as (r + cr*p).
Tensor3 tensor_from_p_slow(const Mat& m, int dl, int d, int dr) {
  Tensor3 t(dl, d, dr);
  for (int p = 0; p < d; ++p)
    for (int r = 0; r < dr; ++r)
      for (int l = 0; l < dl; ++l) t.at(l, p, r) = m(l, Eigen::Index(dr) * p + r);
  return t;
}

Mat p_slow_from_tensor_rf(const Tensor3& t) {
  Mat m(t.dl, Eigen::Index(t.d) * t.dr);
  for (int p = 0; p < t.d; ++p)
    for (int r = 0; r < t.dr; ++r)
      for (int l = 0; l < t.dl; ++l) m(l, Eigen::Index(t.dr) * p + r) = t.at(l, p, r);
  return m;
}

// carry (cl x DL) times effective site -> ((cl*d) x DR) left-fused block.
Mat carry_times_site(const Mat& carry, const RefView& ref, int k) {
  const auto& tb = ref.base->sites[k];
  const int d = ref.d(), Wl = ref.wl(k), Wr = ref.wr(k);
  const int cl = int(carry.rows());
  Mat B = Mat::Zero(Eigen::Index(cl) * d, Eigen::Index(tb.dr) * Wr);
  for (int a = 0; a < Wl; ++a)
    for (int pi = 0; pi < d; ++pi) {
      Mat G = carry.middleCols(Eigen::Index(tb.dl) * a, tb.dl) * tb.slice(pi);
      for (int po = 0; po < d; ++po)
        for (int b = 0; b < Wr; ++b) {
          cx coef = ref.w(k, a, po, pi, b);
          if (coef == cx(0, 0)) continue;
          B.block(Eigen::Index(cl) * po, Eigen::Index(tb.dr) * b, cl, tb.dr) +=
              coef * G;
        }
    }
  return B;
}

// effective site times carry (DR x cr) -> (DL x (cr*d)) with p slow.
Mat site_times_carry(const RefView& ref, int k, const Mat& carry) {
  const auto& tb = ref.base->sites[k];
  const int d = ref.d(), Wl = ref.wl(k), Wr = ref.wr(k);
  const int cr = int(carry.cols());
  Mat B = Mat::Zero(Eigen::Index(tb.dl) * Wl, Eigen::Index(cr) * d);
  for (int b = 0; b < Wr; ++b)
    for (int pi = 0; pi < d; ++pi) {
      Mat G = tb.slice(pi) * carry.middleRows(Eigen::Index(tb.dr) * b, tb.dr);
      for (int po = 0; po < d; ++po)
        for (int a = 0; a < Wl; ++a) {
          cx coef = ref.w(k, a, po, pi, b);
          if (coef == cx(0, 0)) continue;
          B.block(Eigen::Index(tb.dl) * a, Eigen::Index(cr) * po, tb.dl, cr) +=
              coef * G;
        }
    }
  return B;
}

struct IsoSplit {
  Mat iso;    // isometric factor
  Mat carry;  // non-isometric remainder
  double discarded = 0.0;
  bool degenerate = false;
};

// B ((l) x cols) -> iso (l x k) with orthonormal columns, carry (k x cols).
IsoSplit split_left_iso(const Mat& B, const SplitOptions& opt) {
  IsoSplit out;
  if (B.cols() <= opt.chi_max && B.cols() <= B.rows()) {
    auto ts = truncated_split_product(B, Mat::Identity(B.cols(), B.cols()), opt);
    out.iso = std::move(ts.left);
    out.carry = std::move(ts.right);
    return out;
  }
  auto ts = truncated_split(B, opt);
  out.iso = std::move(ts.left);
  out.carry = std::move(ts.right);
  out.discarded = ts.discarded_sq;
  out.degenerate = ts.split_degenerate;
  return out;
}

// B (rows x cols) -> carry (rows x k), iso (k x cols) with orthonormal rows.
IsoSplit split_right_iso(const Mat& B, const SplitOptions& opt) {
  IsoSplit out;
  Mat bh = B.adjoint();
  if (B.rows() <= opt.chi_max && B.rows() <= B.cols()) {
    auto ts = truncated_split_product(bh, Mat::Identity(B.rows(), B.rows()), opt);
    out.iso = adjoint_copy(ts.left);
    out.carry = adjoint_copy(ts.right);
    return out;
  }
  auto ts = truncated_split(bh, opt);
  out.iso = adjoint_copy(ts.left);
  out.carry = adjoint_copy(ts.right);
  out.discarded = ts.discarded_sq;
  out.degenerate = ts.split_degenerate;
  return out;
}

}  // namespace

namespace detail {

std::pair<TensorTrain, CompressReport> fit_compress(const RefView& ref,
                                                    double norm_ref_stored,
                                                    const CompressOptions& opt) {
  if (opt.chi_max < 1) throw std::invalid_argument("compress: chi_max < 1");
  const int n = ref.n();
  const int d = ref.d();
  SplitOptions sopt{opt.chi_max, opt.sv_floor, 1e-12};

  CompressReport rep;
  rep.norm_ref = norm_ref_stored;

  TensorTrain out;
  out.phys_dim = d;
  out.log_norm = ref.base->log_norm;
  out.sites.assign(n, Tensor3());

  const int center = ref.base->canonical_center.value_or(0);
  const bool zip_forward = center == 0;  // right-canonical base: zip L->R
  double init_discarded = 0.0;

  if (n == 1) {
    Mat B = carry_times_site(Mat::Ones(1, 1), ref, 0);
    out.sites[0] = Tensor3::from_matrix_lf(B, 1, d, 1);
    out.canonical_center = 0;
    rep.norm_out = B.norm();
    rep.overlap = cx(rep.norm_out * rep.norm_out, 0);
    rep.f = 1.0;
    rep.epsilon = 0.0;
    rep.max_chi = 1;
    return {std::move(out), rep};
  }

  if (zip_forward) {
    Mat carry = Mat::Ones(1, 1);
    for (int k = 0; k < n; ++k) {
      Mat B = carry_times_site(carry, ref, k);
      if (k == n - 1) {
        out.sites[k] = Tensor3::from_matrix_lf(B, int(carry.rows()), d, 1);
        break;
      }
      auto sp = split_left_iso(B, sopt);
      init_discarded += sp.discarded;
      rep.split_degenerate |= sp.degenerate;
      out.sites[k] =
          Tensor3::from_matrix_lf(sp.iso, int(carry.rows()), d, int(sp.iso.cols()));
      carry = std::move(sp.carry);
    }
    out.canonical_center = n - 1;
  } else {
    Mat carry = Mat::Ones(1, 1);
    for (int k = n - 1; k >= 0; --k) {
      Mat B = site_times_carry(ref, k, carry);  // (DL x (cr*d)), p slow
      if (k == 0) {
        out.sites[k] = tensor_from_p_slow(B, 1, d, int(carry.cols()));
        break;
      }
      auto sp = split_right_iso(B, sopt);
      init_discarded += sp.discarded;
      rep.split_degenerate |= sp.degenerate;
      out.sites[k] = tensor_from_p_slow(sp.iso, int(sp.iso.rows()), d, int(carry.cols()));
      carry = std::move(sp.carry);
    }
    out.canonical_center = 0;
  }
  rep.max_chi = out.max_bond();

  // Exact shortcut: nothing above the floor was discarded, so the zip result
  // already reproduces the reference and sweeping cannot improve it.
  const double nref2 = norm_ref_stored * norm_ref_stored;
  if (init_discarded <= kExactDiscard * std::max(1.0, nref2)) {
    const auto& c = out.sites[*out.canonical_center];
    double n2 = 0.0;
    for (const auto& z : c.v) n2 += std::norm(z);
    rep.norm_out = std::sqrt(n2);
    rep.overlap = cx(n2, 0);
    rep.f = std::min(1.0, n2 / nref2);
    rep.epsilon = std::sqrt(std::max(0.0, 2.0 * (1.0 - std::sqrt(rep.f))));
    return {std::move(out), rep};
  }

  // Two-site variational sweeps against the lazy reference.
  std::vector<Mat> lenv(n + 1), renv(n + 1);
  lenv[0] = Mat::Ones(1, 1);
  renv[n] = Mat::Ones(1, 1);

  double prev_f = -1.0;
  double kept_sq = 0.0;
  int sweeps_done = 0;
  bool start_ltr = (*out.canonical_center == 0);

  if (start_ltr)
    for (int k = n - 1; k >= 2; --k)
      renv[k] = env_right_step(renv[k + 1], out.sites[k], ref, k);
  else
    for (int k = 0; k + 2 <= n; ++k)
      lenv[k + 1] = env_left_step(lenv[k], out.sites[k], ref, k);

  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    rep.split_degenerate = false;
    bool ltr = start_ltr ? (sweep % 2 == 0) : (sweep % 2 == 1);
    if (ltr) {
      for (int k = 0; k + 1 < n; ++k) {
        Mat P = proj_left(lenv[k], ref, k);
        Mat Q = proj_right(renv[k + 2], ref, k + 1);
        auto ts = truncated_split_product(P, Q, sopt);
        rep.split_degenerate |= ts.split_degenerate;
        int cl = int(lenv[k].rows()), cr = int(renv[k + 2].cols());
        int kk = int(ts.left.cols());
        out.sites[k] = Tensor3::from_matrix_lf(ts.left, cl, d, kk);
        out.sites[k + 1] = tensor_from_p_slow(ts.right, kk, d, cr);
        kept_sq = ts.total_sq - ts.discarded_sq;
        lenv[k + 1] = env_left_step(lenv[k], out.sites[k], ref, k);
      }
      out.canonical_center = n - 1;
    } else {
      for (int k = n - 2; k >= 0; --k) {
        Mat P = proj_left(lenv[k], ref, k);
        Mat Q = proj_right(renv[k + 2], ref, k + 1);
        auto ts = truncated_split_product(Mat(Q.adjoint()), Mat(P.adjoint()), sopt);
        rep.split_degenerate |= ts.split_degenerate;
        int cl = int(lenv[k].rows()), cr = int(renv[k + 2].cols());
        int kk = int(ts.left.cols());
        // Q^H P^H = L R  =>  P Q = R^H L^H : right factor iso rows.
        out.sites[k + 1] = tensor_from_p_slow(Mat(ts.left.adjoint()), kk, d, cr);
        out.sites[k] = Tensor3::from_matrix_lf(Mat(ts.right.adjoint()), cl, d, kk);
        kept_sq = ts.total_sq - ts.discarded_sq;
        renv[k + 1] = env_right_step(renv[k + 2], out.sites[k + 1], ref, k + 1);
      }
      out.canonical_center = 0;
    }
    ++sweeps_done;
    double f_now = kept_sq / nref2;
    if (sweeps_done >= opt.min_sweeps && prev_f >= 0.0 &&
        std::abs(f_now - prev_f) < opt.overlap_tol)
      break;
    prev_f = f_now;
  }

  rep.sweeps = sweeps_done;
  rep.max_chi = out.max_bond();
  rep.norm_out = std::sqrt(std::max(0.0, kept_sq));
  rep.overlap = cx(kept_sq, 0.0);
  rep.f = kept_sq / nref2;
  rep.f = std::min(rep.f, 1.0);
  double cosang = rep.norm_out > 0 ? rep.norm_out / norm_ref_stored : 0.0;
  rep.epsilon = std::sqrt(std::max(0.0, 2.0 * (1.0 - std::min(1.0, cosang))));
  return {std::move(out), rep};
}

}  // namespace detail

std::pair<TensorTrain, CompressReport> compress_two_site(
    const TensorTrain& init, int chi_max, const TensorTrain& reference,
    const CompressOptions& opt_in) {
  (void)init;  // the zip initialization is rebuilt from the reference
  CompressOptions opt = opt_in;
  opt.chi_max = chi_max;
  TensorTrain ref_copy = reference;
  if (!ref_copy.canonical_center || (*ref_copy.canonical_center != 0 &&
                                     *ref_copy.canonical_center != ref_copy.size() - 1))
    canonicalize(ref_copy, ref_copy.size() - 1);
  double nref = 0.0;
  {
    const auto& c = ref_copy.sites[*ref_copy.canonical_center];
    double n2 = 0.0;
    for (const auto& z : c.v) n2 += std::norm(z);
    nref = std::sqrt(n2);
  }
  RefView rv{&ref_copy, nullptr};
  return detail::fit_compress(rv, nref, opt);
}

std::pair<TensorTrain, CompressReport> apply_and_compress(
    const TensorTrain& base, const CompiledLayer& layer, double base_norm,
    const CompressOptions& opt) {
  if (int(layer.tensors.size()) != base.size())
    throw std::invalid_argument("apply_and_compress: length mismatch");
  if (layer.phys_dim != base.phys_dim)
    throw std::invalid_argument("apply_and_compress: physical dim mismatch");
  const TensorTrain* b = &base;
  TensorTrain scratch;
  if (!base.canonical_center ||
      (*base.canonical_center != 0 && *base.canonical_center != base.size() - 1)) {
    scratch = base;
    canonicalize(scratch, 0);
    b = &scratch;
  }
  RefView rv{b, &layer};
  return detail::fit_compress(rv, base_norm, opt);
}

cx overlap(const TensorTrain& a, const TensorTrain& b) {
  if (a.size() != b.size() || a.phys_dim != b.phys_dim)
    throw std::invalid_argument("overlap: shape mismatch");
  Mat e = Mat::Ones(1, 1);
  for (int k = 0; k < a.size(); ++k) {
    const auto& ta = a.sites[k];
    const auto& tb = b.sites[k];
    Mat next = Mat::Zero(ta.dr, tb.dr);
    for (int p = 0; p < a.phys_dim; ++p)
      next += ta.slice(p).adjoint() * e * tb.slice(p);
    e = std::move(next);
  }
  return e(0, 0) * std::exp(a.log_norm + b.log_norm);
}

double norm(const TensorTrain& tt) {
  return std::sqrt(std::abs(overlap(tt, tt)));
}

cx op_inner(const TensorTrain& a, const TensorTrain& b) {
  if (a.phys_dim != 4) throw std::invalid_argument("op_inner: phys_dim must be 4");
  return overlap(a, b) * std::exp(-double(a.size()) * std::log(2.0));
}

std::vector<RVec> bond_spectra(const TensorTrain& tt) {
  TensorTrain w = tt;
  canonicalize(w, 0);
  std::vector<RVec> out;
  for (int k = 0; k + 1 < w.size(); ++k) {
    auto dec = svd(w.sites[k].lf());
    out.push_back(dec.s);
    Mat carry = dec.s.asDiagonal() * dec.vh;
    int r = int(dec.u.cols());
    w.sites[k] = Tensor3::from_matrix_lf(dec.u, w.sites[k].dl, w.sites[k].d, r);
    Mat nm = carry * w.sites[k + 1].rf();
    w.sites[k + 1] = Tensor3::from_matrix_rf(nm, r, w.sites[k + 1].d, w.sites[k + 1].dr);
  }
  return out;
}

namespace {

double entropy_of(const RVec& s) {
  double tot = s.squaredNorm();
  if (tot <= 0) return 0.0;
  double h = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    double p = s[i] * s[i] / tot;
    if (p > 1e-300) h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double entanglement_entropy(const TensorTrain& tt, int cut) {
  if (cut < 0 || cut + 1 >= tt.size())
    throw std::invalid_argument("entanglement_entropy: cut out of range");
  TensorTrain w = tt;
  canonicalize(w, cut);
  auto dec = svd(w.sites[cut].lf());
  return entropy_of(dec.s);
}

double max_oee(const TensorTrain& tt) {
  double best = 0.0;
  for (const auto& s : bond_spectra(tt)) best = std::max(best, entropy_of(s));
  return best;
}

cx contract_with_product(const TensorTrain& tt, const std::vector<Vec>& w) {
  if (int(w.size()) != tt.size())
    throw std::invalid_argument("contract_with_product: length mismatch");
  Mat e = Mat::Ones(1, 1);
  for (int k = 0; k < tt.size(); ++k) {
    if (int(w[k].size()) != tt.phys_dim)
      throw std::invalid_argument("contract_with_product: weight size mismatch");
    Mat next = Mat::Zero(1, tt.sites[k].dr);
    for (int p = 0; p < tt.phys_dim; ++p) next += w[k][p] * (e * tt.sites[k].slice(p));
    e = std::move(next);
  }
  return e(0, 0) * std::exp(tt.log_norm);
}

cx overlap_with_site_op(const TensorTrain& a, const TensorTrain& b, int site,
                        const Mat& op) {
  if (a.size() != b.size() || a.phys_dim != b.phys_dim)
    throw std::invalid_argument("overlap_with_site_op: shape mismatch");
  Mat e = Mat::Ones(1, 1);
  for (int k = 0; k < a.size(); ++k) {
    const auto& ta = a.sites[k];
    const auto& tb = b.sites[k];
    Mat next = Mat::Zero(ta.dr, tb.dr);
    if (k == site) {
      for (int p = 0; p < a.phys_dim; ++p)
        for (int q = 0; q < a.phys_dim; ++q) {
          cx coef = op(p, q);
          if (coef == cx(0, 0)) continue;
          next += coef * (ta.slice(p).adjoint() * e * tb.slice(q));
        }
    } else {
      for (int p = 0; p < a.phys_dim; ++p)
        next += ta.slice(p).adjoint() * e * tb.slice(p);
    }
    e = std::move(next);
  }
  return e(0, 0) * std::exp(a.log_norm + b.log_norm);
}

}  // namespace hexmpo
