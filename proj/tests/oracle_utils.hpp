#pragma once

// Test-only dense oracles: naive contractions independent of the library's
// sweep/environment code paths.

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hexmpo/circuit.hpp"
#include "hexmpo/tensor_train.hpp"

namespace oracle {

using hexmpo::cx;
using hexmpo::Mat;
using hexmpo::Vec;

// Dense vector of a tensor train by sequential index expansion.
inline Vec dense_vector(const hexmpo::TensorTrain& tt) {
  const int d = tt.phys_dim;
  // state[b * D + x] after k sites: bond index b, expanded physical index x
  Eigen::Index D = 1;
  Mat cur = Mat::Ones(1, 1);  // rows: expanded phys, cols: bond
  for (const auto& s : tt.sites) {
    Mat next = Mat::Zero(D * d, s.dr);
    for (int p = 0; p < d; ++p) {
      // next[(x*d + p), r] += cur[x, l] * s(l, p, r)
      Mat slice(s.dl, s.dr);
      for (int l = 0; l < s.dl; ++l)
        for (int r = 0; r < s.dr; ++r) slice(l, r) = s.at(l, p, r);
      Mat contrib = cur * slice;  // D x dr
      for (Eigen::Index x = 0; x < D; ++x) next.row(x * d + p) += contrib.row(x);
    }
    cur = std::move(next);
    D *= d;
  }
  Vec out = cur.col(0) * std::exp(tt.log_norm);
  return out;
}

// Dense matrix of a compiled layer by the same expansion over (out, in).
inline Mat dense_operator(const hexmpo::CompiledLayer& layer) {
  const int d = layer.phys_dim;
  Eigen::Index D = 1;
  Mat cur = Mat::Ones(1, 1);  // rows: expanded (out, in) pairs, cols: bond
  for (const auto& w : layer.tensors) {
    Mat next = Mat::Zero(D * d * d, w.wr);
    for (int po = 0; po < d; ++po)
      for (int pi = 0; pi < d; ++pi) {
        Mat slice(w.wl, w.wr);
        for (int l = 0; l < w.wl; ++l)
          for (int r = 0; r < w.wr; ++r) slice(l, r) = w.at(l, po, pi, r);
        Mat contrib = cur * slice;
        for (Eigen::Index x = 0; x < D; ++x)
          next.row((x * d + po) * d + pi) += contrib.row(x);
      }
    cur = std::move(next);
    D *= d;
  }
  // rows currently enumerate (o1, i1, o2, i2, ...): regroup to (o...),(i...)
  const int n = int(layer.tensors.size());
  Eigen::Index dim = 1;
  for (int k = 0; k < n; ++k) dim *= d;
  Mat out(dim, dim);
  for (Eigen::Index row = 0; row < cur.rows(); ++row) {
    Eigen::Index o = 0, i = 0, x = row;
    std::vector<int> digits(2 * n);
    for (int k = 2 * n - 1; k >= 0; --k) {
      digits[k] = int(x % d);
      x /= d;
    }
    for (int k = 0; k < n; ++k) {
      o = o * d + digits[2 * k];
      i = i * d + digits[2 * k + 1];
    }
    out(o, i) = cur(row, 0);
  }
  return out;
}

// Random tensor train with given bond dimension profile.
inline hexmpo::TensorTrain random_train(int n, int d, int chi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  hexmpo::TensorTrain tt;
  tt.phys_dim = d;
  for (int k = 0; k < n; ++k) {
    int dl = k == 0 ? 1 : chi;
    int dr = k == n - 1 ? 1 : chi;
    hexmpo::Tensor3 t(dl, d, dr);
    for (auto& v : t.v) v = cx(g(rng), g(rng));
    tt.sites.push_back(std::move(t));
  }
  return tt;
}

// <a|b> by dense expansion.
inline cx dense_overlap(const hexmpo::TensorTrain& a, const hexmpo::TensorTrain& b) {
  return dense_vector(a).dot(dense_vector(b));  // Eigen dot conjugates lhs
}

// Kronecker product helper (site 0 = most significant factor, matching the
// dense_vector expansion order).
inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Embed a 2^k-dim gate acting on (sorted) 1D positions into the full space
// via kron with identities; positions index the dense_vector ordering
// (position 0 = most significant).
inline Mat embed(const Mat& gate, const std::vector<int>& positions, int n) {
  // build by iterating basis states; gate given on the ordered position list
  const Eigen::Index dim = Eigen::Index(1) << n;
  Mat out = Mat::Zero(dim, dim);
  const int k = int(positions.size());
  for (Eigen::Index col = 0; col < dim; ++col) {
    // extract bits at positions (MSB-first ordering of dense_vector)
    int sub = 0;
    for (int t = 0; t < k; ++t) {
      int bit = (col >> (n - 1 - positions[t])) & 1;
      sub = (sub << 1) | bit;
    }
    for (int subo = 0; subo < (1 << k); ++subo) {
      cx val = gate(subo, sub);
      if (val == cx(0, 0)) continue;
      Eigen::Index row = col;
      for (int t = 0; t < k; ++t) {
        int bit = (subo >> (k - 1 - t)) & 1;
        Eigen::Index mask = Eigen::Index(1) << (n - 1 - positions[t]);
        row = bit ? (row | mask) : (row & ~mask);
      }
      out(row, col) += val;
    }
  }
  return out;
}

}  // namespace oracle
