#include <doctest.h>

#include <random>

#include "hexmpo/circuit.hpp"
#include "hexmpo/tensor_train.hpp"
#include "oracle_utils.hpp"

using namespace hexmpo;

namespace {

void check_isometries(const TensorTrain& tt, int center) {
  for (int k = 0; k < center; ++k) {
    Mat m = tt.sites[k].lf();
    CHECK((m.adjoint() * m - Mat::Identity(m.cols(), m.cols())).norm() < 1e-10);
  }
  for (int k = center + 1; k < tt.size(); ++k) {
    Mat m = tt.sites[k].rf();
    CHECK((m * m.adjoint() - Mat::Identity(m.rows(), m.rows())).norm() < 1e-10);
  }
}

// TT-SVD truncation of the dense vector: the independent quality oracle for
// two-site variational compression.
double ttsvd_fidelity(const Vec& v, int n, int d, int chi) {
  Mat cur = v;  // column
  // reshape progressively: left index grows by d each step
  std::vector<Mat> pieces;
  Eigen::Index rest = v.size();
  Mat carry = Mat::Ones(1, 1);
  Eigen::Index r = 1;
  Vec work = v;
  for (int k = 0; k + 1 < n; ++k) {
    rest /= d;
    Mat m(r * d, rest);
    for (Eigen::Index i = 0; i < r * d; ++i)
      for (Eigen::Index j = 0; j < rest; ++j) m(i, j) = work[i * rest + j];
    Eigen::BDCSVD<Mat> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::Index keep = std::min<Eigen::Index>(chi, dec.singularValues().size());
    pieces.push_back(dec.matrixU().leftCols(keep));
    Mat next = dec.singularValues().head(keep).asDiagonal() *
               dec.matrixV().adjoint().topRows(keep);
    work = Vec(next.rows() * next.cols());
    for (Eigen::Index i = 0; i < next.rows(); ++i)
      for (Eigen::Index j = 0; j < next.cols(); ++j)
        work[i * next.cols() + j] = next(i, j);
    r = keep;
  }
  // rebuild dense fit
  Mat acc = Mat::Ones(1, 1);
  Eigen::Index D = 1;
  for (int k = 0; k + 1 < n; ++k) {
    const Mat& u = pieces[k];
    Eigen::Index rl = u.rows() / d, rr = u.cols();
    Mat next = Mat::Zero(D * d, rr);
    for (int p = 0; p < d; ++p) {
      Mat slice(rl, rr);
      for (Eigen::Index l = 0; l < rl; ++l) slice.row(l) = u.row(l * d + p);
      Mat contrib = acc * slice;
      for (Eigen::Index x = 0; x < D; ++x) next.row(x * d + p) += contrib.row(x);
    }
    acc = std::move(next);
    D *= d;
  }
  // last site holds `work` reshaped (r x d)
  Vec fit(D * d);
  for (Eigen::Index x = 0; x < D; ++x)
    for (int p = 0; p < d; ++p) {
      cx val = 0;
      for (Eigen::Index l = 0; l < acc.cols(); ++l)
        val += acc(x, l) * work[l * d + p];
      fit[x * d + p] = val;
    }
  cx ov = fit.dot(v);
  return std::norm(ov) / (fit.squaredNorm() * v.squaredNorm());
}

}  // namespace

TEST_CASE("pauli train vectorization matches the dense operator") {
  auto p = parse_pauli("-1 X0 Z2", 3);
  auto tt = TensorTrain::from_pauli(p);
  CHECK(tt.phys_dim == 4);
  Vec v = oracle::dense_vector(tt);
  // index = sum over sites of (2 s_k + s'_k) * 4^{n-1-k}
  Mat sx = (Mat(2, 2) << 0, 1, 1, 0).finished();
  Mat sz = (Mat(2, 2) << 1, 0, 0, -1).finished();
  Mat id = Mat::Identity(2, 2);
  Mat op = -oracle::kron(sx, oracle::kron(id, sz));
  for (int s0 = 0; s0 < 2; ++s0)
    for (int s1 = 0; s1 < 2; ++s1)
      for (int s2 = 0; s2 < 2; ++s2)
        for (int t0 = 0; t0 < 2; ++t0)
          for (int t1 = 0; t1 < 2; ++t1)
            for (int t2 = 0; t2 < 2; ++t2) {
              int row = s0 * 4 + s1 * 2 + s2;
              int col = t0 * 4 + t1 * 2 + t2;
              int fused = (2 * s0 + t0) * 16 + (2 * s1 + t1) * 4 + (2 * s2 + t2);
              CHECK(std::abs(v[fused] - op(row, col)) < 1e-12);
            }
  // unit operator norm: <P|P> = 1
  CHECK(std::abs(op_inner(tt, tt) - cx(1, 0)) < 1e-12);
}

TEST_CASE("pauli trains are orthonormal under the operator inner product") {
  auto a = TensorTrain::from_pauli(parse_pauli("+1 X0 Y1", 4));
  auto b = TensorTrain::from_pauli(parse_pauli("+1 X0 Z1", 4));
  CHECK(std::abs(op_inner(a, a) - cx(1, 0)) < 1e-12);
  CHECK(std::abs(op_inner(a, b)) < 1e-12);
}

TEST_CASE("canonicalize preserves the vector and builds isometries") {
  auto tt = oracle::random_train(7, 2, 8, 42);
  Vec before = oracle::dense_vector(tt);
  for (int center : {0, 3, 6}) {
    auto w = tt;
    canonicalize(w, center);
    CHECK(w.canonical_center == center);
    check_isometries(w, center);
    Vec after = oracle::dense_vector(w);
    CHECK((before - after).norm() / before.norm() < 1e-12);
  }
  // overlap with original = 1 within 1e-12 when normalized
  auto w = tt;
  canonicalize(w, 4);
  cx ov = overlap(w, tt);
  CHECK(std::abs(ov / std::sqrt(std::abs(overlap(tt, tt)) *
                                std::abs(overlap(w, w)))) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("canonicalize on a product state keeps values") {
  Vec up(2);
  up << 1.0, 0.0;
  auto tt = TensorTrain::product(std::vector<Vec>(5, up));
  auto w = tt;
  canonicalize(w, 0);
  for (int k = 0; k < 5; ++k)
    for (size_t i = 0; i < w.sites[k].v.size(); ++i)
      CHECK(std::abs(w.sites[k].v[i] - tt.sites[k].v[i]) < 1e-15);
}

TEST_CASE("re-canonicalization is idempotent up to gauge") {
  auto tt = oracle::random_train(6, 2, 6, 43);
  canonicalize(tt, 2);
  auto spectra1 = bond_spectra(tt);
  canonicalize(tt, 2);
  auto spectra2 = bond_spectra(tt);
  for (size_t k = 0; k < spectra1.size(); ++k) {
    Eigen::Index m = std::min(spectra1[k].size(), spectra2[k].size());
    CHECK((spectra1[k].head(m) - spectra2[k].head(m)).norm() < 1e-10);
  }
}

TEST_CASE("apply_layer matches dense application (pure and doubled)") {
  auto lat = build_single_hexagon_12();
  auto order = snake_order(lat);
  // restrict to the first 8 sites via a path-graph lattice
  Lattice path;
  path.site_count = 8;
  for (int i = 0; i + 1 < 8; ++i) path.edges.push_back({i, i + 1});
  path.edges.push_back({0, 5});  // one long-range bond
  std::sort(path.edges.begin(), path.edges.end());
  path.color_groups = color_edges(path.edges);
  SnakeOrder po;
  for (int i = 0; i < 8; ++i) po.site.push_back(i);
  po.position = po.site;
  path.snake = po;
  path.validate();

  GateLayer layer;
  layer.bonds = {{1, 2}, {0, 5}};
  layer.spans = {{1, 2}, {0, 5}};
  // the two spans overlap, schedule them separately
  GateLayer l1{{Edge{1, 2}}, {{1, 2}}};
  GateLayer l2{{Edge{0, 5}}, {{0, 5}}};

  for (bool doubled : {false, true}) {
    const int d = doubled ? 4 : 2;
    auto cl1 = compile_zz_layer(l1, 0.83, doubled, 8, po);
    auto cl2 = compile_zz_layer(l2, -0.41, doubled, 8, po);
    auto tt = oracle::random_train(8, d, 3, doubled ? 77 : 78);
    auto applied = apply_layer(apply_layer(tt, cl1), cl2);
    Vec lhs = oracle::dense_vector(applied);
    Mat op = oracle::dense_operator(cl2) * oracle::dense_operator(cl1);
    Vec rhs = op * oracle::dense_vector(tt);
    CHECK((lhs - rhs).norm() / rhs.norm() < 1e-10);
  }
}

TEST_CASE("identity layer leaves the train unchanged") {
  SnakeOrder po;
  for (int i = 0; i < 5; ++i) po.site.push_back(i);
  po.position = po.site;
  GateLayer l{{Edge{1, 3}}, {{1, 3}}};
  auto cl = compile_zz_layer(l, 0.0, false, 5, po);
  CHECK(cl.max_bond == 1);
  auto tt = oracle::random_train(5, 2, 4, 3);
  auto out = apply_layer(tt, cl);
  CHECK((oracle::dense_vector(out) - oracle::dense_vector(tt)).norm() < 1e-12);
}

TEST_CASE("doubled ZZ layer on a chi=1 pauli train gives chi <= 4") {
  SnakeOrder po;
  for (int i = 0; i < 6; ++i) po.site.push_back(i);
  po.position = po.site;
  GateLayer l{{Edge{2, 3}}, {{2, 3}}};
  auto cl = compile_zz_layer(l, -3.14159265358979323846 / 2, true, 6, po);
  CHECK(cl.max_bond == 4);
  auto tt = TensorTrain::from_pauli(parse_pauli("+1 X2", 6));
  auto out = apply_layer(tt, cl);
  CHECK(out.max_bond() <= 4);
}

TEST_CASE("compress: target already within cap is exact") {
  auto tt = oracle::random_train(6, 2, 4, 91);
  auto [out, rep] = compress_two_site(tt, 4, tt);
  CHECK(rep.epsilon == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rep.f == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((oracle::dense_vector(out) - oracle::dense_vector(tt)).norm() /
            oracle::dense_vector(tt).norm() <
        1e-12);
}

TEST_CASE("compress: chi=4 target to chi=4 keeps expectation values") {
  auto tt = oracle::random_train(6, 4, 4, 92);
  auto [out, rep] = compress_two_site(tt, 4, tt);
  Vec a = oracle::dense_vector(tt), b = oracle::dense_vector(out);
  CHECK((a - b).norm() / a.norm() < 1e-12);
}

TEST_CASE("compress quality matches the dense TT-SVD oracle") {
  auto tt = oracle::random_train(8, 2, 16, 4242);
  auto [out, rep] = compress_two_site(tt, 8, tt);
  CHECK(out.max_bond() <= 8);
  Vec v = oracle::dense_vector(tt);
  double f_oracle = ttsvd_fidelity(v, 8, 2, 8);
  CHECK(rep.f >= f_oracle - 1e-9);  // variational is at least as good
  CHECK(rep.f == doctest::Approx(f_oracle).epsilon(1e-6));
  // identity: epsilon and f from the unit-normalized dense pair
  Vec w = oracle::dense_vector(out);
  cx ov = w.dot(v) / (w.norm() * v.norm());
  CHECK(rep.f == doctest::Approx(std::norm(ov)).epsilon(1e-10));
  double eps2 = 2.0 * (1.0 - ov.real());
  CHECK(rep.epsilon * rep.epsilon == doctest::Approx(eps2).epsilon(1e-8));
}

TEST_CASE("compress rejects chi_max < 1") {
  auto tt = oracle::random_train(4, 2, 2, 5);
  CHECK_THROWS_AS(compress_two_site(tt, 0, tt), std::invalid_argument);
}

TEST_CASE("apply_and_compress equals apply + compress on small instances") {
  SnakeOrder po;
  for (int i = 0; i < 7; ++i) po.site.push_back(i);
  po.position = po.site;
  GateLayer l{{Edge{1, 2}, Edge{4, 6}}, {{1, 2}, {4, 6}}};
  auto cl = compile_zz_layer(l, 0.9, false, 7, po);
  auto base = oracle::random_train(7, 2, 5, 17);
  canonicalize(base, 0);
  double nb = norm(base);
  CompressOptions opt;
  opt.chi_max = 5;
  auto [fit, rep] = apply_and_compress(base, cl, nb, opt);
  // dense reference
  Vec target = oracle::dense_operator(cl) * oracle::dense_vector(base);
  Vec got = oracle::dense_vector(fit);
  cx ov = got.dot(target) / (got.norm() * target.norm());
  CHECK(rep.f == doctest::Approx(std::norm(ov)).epsilon(1e-9));
  double f_oracle = ttsvd_fidelity(target, 7, 2, 5);
  CHECK(rep.f >= f_oracle - 1e-9);
}

TEST_CASE("entanglement entropy basics") {
  Vec up(2);
  up << 1.0, 0.0;
  auto prod = TensorTrain::product(std::vector<Vec>(6, up));
  for (int cut = 0; cut + 1 < 6; ++cut)
    CHECK(entanglement_entropy(prod, cut) == doctest::Approx(0.0).epsilon(1e-12));

  // Bell-like two-site train: maximal rank 2 -> ln 2
  TensorTrain bell;
  bell.phys_dim = 2;
  Tensor3 a(1, 2, 2), b(2, 2, 1);
  a.at(0, 0, 0) = 1.0;
  a.at(0, 1, 1) = 1.0;
  b.at(0, 0, 0) = 1.0;
  b.at(1, 1, 0) = 1.0;
  bell.sites = {a, b};
  CHECK(entanglement_entropy(bell, 0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  CHECK(max_oee(TensorTrain::from_pauli(parse_pauli("+1 Z2", 5))) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("max_oee bounded by log of max bond dimension") {
  auto tt = oracle::random_train(7, 4, 5, 55);
  CHECK(max_oee(tt) <= std::log(5.0) + 1e-9);
}

TEST_CASE("bond spectra are non-negative and descending") {
  auto tt = oracle::random_train(7, 2, 6, 66);
  for (const auto& s : bond_spectra(tt)) {
    for (int i = 0; i < s.size(); ++i) {
      CHECK(s[i] >= 0.0);
      if (i > 0) CHECK(s[i] <= s[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("overlap: normalized self-overlap and orthogonal products") {
  auto tt = oracle::random_train(6, 2, 4, 13);
  cx selfov = overlap(tt, tt);
  CHECK(std::abs(selfov.imag()) < 1e-10 * std::abs(selfov));
  Vec up(2), dn(2);
  up << 1.0, 0.0;
  dn << 0.0, 1.0;
  auto a = TensorTrain::product({up, up, up});
  auto b = TensorTrain::product({up, dn, up});
  CHECK(std::abs(overlap(a, b)) < 1e-14);
  CHECK(std::abs(overlap(a, a) - cx(1, 0)) < 1e-14);
}

TEST_CASE("overlap matches dense contraction on random pairs") {
  for (unsigned seed : {1u, 2u, 3u}) {
    auto a = oracle::random_train(6, 2, 5, seed);
    auto b = oracle::random_train(6, 2, 7, seed + 100);
    cx lhs = overlap(a, b);
    cx rhs = oracle::dense_overlap(a, b);
    CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-10);
  }
}

TEST_CASE("contract_with_product computes boundary expectations") {
  auto p = parse_pauli("+1 Z1", 3);
  auto tt = TensorTrain::from_pauli(p);
  Vec w = Vec::Zero(4);
  w[0] = 1.0;
  cx val = contract_with_product(tt, {w, w, w});
  CHECK(val.real() == doctest::Approx(1.0).epsilon(1e-12));
}
