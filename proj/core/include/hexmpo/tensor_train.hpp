#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hexmpo/linalg.hpp"
#include "hexmpo/pauli.hpp"

namespace hexmpo {

/// Rank-3 site tensor (left bond, physical, right bond), stored flat in
/// column-major order with index l + dl*(p + d*r). The same buffer exposes
/// both fusings as contiguous column-major matrices.
struct Tensor3 {
  int dl = 1, d = 1, dr = 1;
  std::vector<cx> v;

  Tensor3() = default;
  Tensor3(int dl_, int d_, int dr_)
      : dl(dl_), d(d_), dr(dr_), v(size_t(dl_) * d_ * dr_, cx(0, 0)) {}

  size_t size() const { return v.size(); }
  cx& at(int l, int p, int r) { return v[size_t(l) + size_t(dl) * (p + size_t(d) * r)]; }
  cx at(int l, int p, int r) const {
    return v[size_t(l) + size_t(dl) * (p + size_t(d) * r)];
  }

  // (dl*d) x dr view
  Eigen::Map<const Mat> lf() const {
    return {v.data(), Eigen::Index(dl) * d, Eigen::Index(dr)};
  }
  Eigen::Map<Mat> lf() { return {v.data(), Eigen::Index(dl) * d, Eigen::Index(dr)}; }
  // dl x (d*dr) view
  Eigen::Map<const Mat> rf() const {
    return {v.data(), Eigen::Index(dl), Eigen::Index(d) * dr};
  }
  Eigen::Map<Mat> rf() { return {v.data(), Eigen::Index(dl), Eigen::Index(d) * dr}; }
  // dl x dr slice at fixed physical index
  Eigen::Map<const Mat, 0, Eigen::OuterStride<>> slice(int p) const {
    return {v.data() + size_t(dl) * p, dl, dr, Eigen::OuterStride<>(Eigen::Index(dl) * d)};
  }

  static Tensor3 from_matrix_lf(const Mat& m, int dl, int d, int dr);
  static Tensor3 from_matrix_rf(const Mat& m, int dl, int d, int dr);
};

/// Rank-4 operator site tensor (left bond, phys out, phys in, right bond),
/// index wl + Wl*(po + d*(pi + d*wr)).
struct MpoTensor {
  int wl = 1, d = 1, wr = 1;
  std::vector<cx> v;

  MpoTensor() = default;
  MpoTensor(int wl_, int d_, int wr_)
      : wl(wl_), d(d_), wr(wr_), v(size_t(wl_) * d_ * d_ * wr_, cx(0, 0)) {}

  cx& at(int l, int po, int pi, int r) {
    return v[size_t(l) + size_t(wl) * (po + size_t(d) * (pi + size_t(d) * r))];
  }
  cx at(int l, int po, int pi, int r) const {
    return v[size_t(l) + size_t(wl) * (po + size_t(d) * (pi + size_t(d) * r))];
  }
  static MpoTensor identity(int d);
};

/// One compiled gate layer as a bounded-bond tensor-train operator.
struct CompiledLayer {
  std::vector<MpoTensor> tensors;
  int phys_dim = 2;
  int max_bond = 1;
  std::string tag;
};

/// Shared tensor-train container for pure states (phys_dim 2) and
/// vectorized operators (phys_dim 4). A scalar exp(log_norm) is factored
/// out of the stored tensors.
struct TensorTrain {
  int phys_dim = 2;
  std::vector<Tensor3> sites;
  double log_norm = 0.0;
  std::optional<int> canonical_center;

  int size() const { return int(sites.size()); }
  std::vector<int> bond_dims() const;
  int max_bond() const;
  void check_consistent() const;

  /// Product state from per-site vectors (phys_dim = vector length).
  static TensorTrain product(const std::vector<Vec>& site_vectors);
  /// All-up pure state |0...0>.
  static TensorTrain all_up(int n);
  /// Vectorized operator train for a Pauli string, scaled so that
  /// <P|P> = Tr(P^dag P)/2^N = 1 for the stored tensors; the 2^{N/2}
  /// scale sits in log_norm.
  static TensorTrain from_pauli(const PauliString& p);
};

/// Vectorization convention: per site, operator O_{s s'} (s = ket index)
/// fuses to the physical index a = 2*s + s'.
Vec vectorize_op2(const Mat& o);

void canonicalize(TensorTrain& tt, int center);

/// Exact layer application; bond dimensions multiply by the layer bonds.
TensorTrain apply_layer(const TensorTrain& tt, const CompiledLayer& layer);

struct CompressOptions {
  int chi_max = 0;
  double sv_floor = 1e-14;
  int min_sweeps = 2;
  int max_sweeps = 10;
  double overlap_tol = 1e-12;
};

struct CompressReport {
  double epsilon = 0.0;  // |ref_hat - out_hat| with both unit-normalized
  double f = 1.0;        // |<out|ref>|^2 / (|out|^2 |ref|^2)
  double norm_ref = 1.0;
  double norm_out = 1.0;
  cx overlap{1.0, 0.0};  // raw <out|ref> (stored-tensor scale)
  int sweeps = 0;
  int max_chi = 1;
  bool split_degenerate = false;
};

/// Two-site variational compression of `reference` to bond dimension
/// chi_max. `init` seeds the sweeps (SVD truncation of the reference when
/// the seed is unusable). Matches the spec operation
/// compress_two_site(tt, chi_max, reference).
std::pair<TensorTrain, CompressReport> compress_two_site(
    const TensorTrain& init, int chi_max, const TensorTrain& reference,
    const CompressOptions& opt = {});

/// Fused exact-apply + compression against the unmaterialized product
/// layer∘base; norm_ref is taken from `base_norm` (layers here are unitary
/// maps, which preserve the Frobenius norm).
std::pair<TensorTrain, CompressReport> apply_and_compress(
    const TensorTrain& base, const CompiledLayer& layer, double base_norm,
    const CompressOptions& opt);

/// Raw inner product <a|b> including exp(log_norm) factors.
cx overlap(const TensorTrain& a, const TensorTrain& b);
double norm(const TensorTrain& tt);

/// Operator-convention inner product Tr(A^dag B)/2^N for phys_dim-4 trains.
cx op_inner(const TensorTrain& a, const TensorTrain& b);

/// Singular-value spectrum at every cut (index k = bond between sites k
/// and k+1); input is not modified.
std::vector<RVec> bond_spectra(const TensorTrain& tt);

/// Von Neumann entropy (natural log) of squared normalized singular values
/// at `cut`.
double entanglement_entropy(const TensorTrain& tt, int cut);

/// Largest entanglement entropy over all cuts (operator entanglement when
/// phys_dim = 4).
double max_oee(const TensorTrain& tt);

/// Contract against a product of per-site vectors: sum_s w1[s1]...  useful
/// for <up|O|up> style boundary contractions. Includes exp(log_norm).
cx contract_with_product(const TensorTrain& tt, const std::vector<Vec>& w);

/// <a| (op at site) |b> / with no normalization; op acts on the physical
/// index of site `site`.
cx overlap_with_site_op(const TensorTrain& a, const TensorTrain& b, int site,
                        const Mat& op);

}  // namespace hexmpo
