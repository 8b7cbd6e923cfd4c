#include "hexmpo/bptns.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace hexmpo {

namespace {

using Dims = std::array<int, 4>;  // (phys, leg0, leg1, leg2), padded with 1

Dims site_dims(const GraphTNS& t, int s) {
  Dims d{2, 1, 1, 1};
  for (size_t k = 0; k < t.site_edges[s].size(); ++k)
    d[k + 1] = t.edge_dim(t.site_edges[s][k]);
  return d;
}

size_t dims_size(const Dims& d) {
  return size_t(d[0]) * d[1] * d[2] * d[3];
}

// Flat index p + 2*(l0 + d0*(l1 + d1*l2)).
size_t flat(const Dims& d, int p, int l0, int l1, int l2) {
  return size_t(p) +
         size_t(d[0]) * (l0 + size_t(d[1]) * (l1 + size_t(d[2]) * l2));
}

// Fuse the tensor into a matrix with given row/col axis orders (axes 0..3).
Mat fuse(const std::vector<cx>& v, const Dims& d, const std::vector<int>& rows,
         const std::vector<int>& cols) {
  auto dim_of = [&](const std::vector<int>& ax) {
    size_t n = 1;
    for (int a : ax) n *= size_t(d[a]);
    return n;
  };
  Mat m(dim_of(rows), dim_of(cols));
  std::array<int, 4> idx{};
  for (int l2 = 0; l2 < d[3]; ++l2)
    for (int l1 = 0; l1 < d[2]; ++l1)
      for (int l0 = 0; l0 < d[1]; ++l0)
        for (int p = 0; p < d[0]; ++p) {
          idx = {p, l0, l1, l2};
          size_t r = 0, rmul = 1, c = 0, cmul = 1;
          for (int a : rows) {
            r += rmul * size_t(idx[a]);
            rmul *= size_t(d[a]);
          }
          for (int a : cols) {
            c += cmul * size_t(idx[a]);
            cmul *= size_t(d[a]);
          }
          m(r, c) = v[flat(d, p, l0, l1, l2)];
        }
  return m;
}

std::vector<cx> unfuse(const Mat& m, const Dims& d, const std::vector<int>& rows,
                       const std::vector<int>& cols) {
  std::vector<cx> v(dims_size(d));
  std::array<int, 4> idx{};
  for (int l2 = 0; l2 < d[3]; ++l2)
    for (int l1 = 0; l1 < d[2]; ++l1)
      for (int l0 = 0; l0 < d[1]; ++l0)
        for (int p = 0; p < d[0]; ++p) {
          idx = {p, l0, l1, l2};
          size_t r = 0, rmul = 1, c = 0, cmul = 1;
          for (int a : rows) {
            r += rmul * size_t(idx[a]);
            rmul *= size_t(d[a]);
          }
          for (int a : cols) {
            c += cmul * size_t(idx[a]);
            cmul *= size_t(d[a]);
          }
          v[flat(d, p, l0, l1, l2)] = m(r, c);
        }
  return v;
}

// Scale one leg of the flat tensor by per-index weights.
void scale_leg(std::vector<cx>& v, const Dims& d, int leg,
               const std::vector<double>& w) {
  for (int l2 = 0; l2 < d[3]; ++l2)
    for (int l1 = 0; l1 < d[2]; ++l1)
      for (int l0 = 0; l0 < d[1]; ++l0) {
        const int li[3] = {l0, l1, l2};
        const double s = w[li[leg]];
        for (int p = 0; p < d[0]; ++p) v[flat(d, p, l0, l1, l2)] *= s;
      }
}

// Contract leg (1..3) with matrix m: out[.., a', ..] = sum_a in[.., a, ..] m(a, a').
std::vector<cx> contract_leg(const std::vector<cx>& v, Dims& d, int leg,
                             const Mat& m) {
  std::vector<int> rest;
  for (int a = 0; a < 4; ++a)
    if (a != leg) rest.push_back(a);
  Mat in = fuse(v, d, rest, {leg});
  Mat out = in * m;
  Dims nd = d;
  nd[leg] = int(m.cols());
  auto res = unfuse(out, nd, rest, {leg});
  d = nd;
  return res;
}

std::vector<double> sqrt_vec(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = std::sqrt(std::max(0.0, v[i]));
  return out;
}

std::vector<double> inv_floor(const std::vector<double>& v, double rel = 1e-12) {
  double mx = 0;
  for (double x : v) mx = std::max(mx, x);
  std::vector<double> out(v.size(), 0.0);
  for (size_t i = 0; i < v.size(); ++i)
    out[i] = v[i] > rel * mx ? 1.0 / v[i] : 0.0;
  return out;
}

int other_end(const Edge& e, int s) { return e.first == s ? e.second : e.first; }

// Working tensor with sqrt(lambda) absorbed on every leg.
std::vector<cx> sqrt_absorbed(const GraphTNS& t, int s, Dims& d) {
  d = site_dims(t, s);
  std::vector<cx> v = t.site[s];
  for (size_t k = 0; k < t.site_edges[s].size(); ++k)
    scale_leg(v, d, int(k), sqrt_vec(t.lambda[t.site_edges[s][k]]));
  return v;
}

Mat trace_normalized(Mat m) {
  m = 0.5 * (m + m.adjoint()).eval();
  double tr = m.trace().real();
  if (std::abs(tr) > 1e-300) m /= tr;
  return m;
}

// One message update m_{s -> t past leg `out_leg`}.
Mat message_step(const GraphTNS& tns, const MessageSet& msgs, int s,
                 int out_leg) {
  Dims d;
  auto A = sqrt_absorbed(tns, s, d);
  Dims gd = d;
  std::vector<cx> G = A;
  for (size_t k = 0; k < tns.site_edges[s].size(); ++k) {
    if (int(k) == out_leg) continue;
    int e = tns.site_edges[s][k];
    int w = other_end(tns.lat->edges[e], s);
    G = contract_leg(G, gd, int(k) + 1, msgs.m.at({w, s}));
  }
  std::vector<int> rest;
  for (int a = 0; a < 4; ++a)
    if (a != out_leg + 1) rest.push_back(a);
  Mat Gm = fuse(G, gd, rest, {out_leg + 1});
  Mat Am = fuse(A, d, rest, {out_leg + 1});
  Mat out = Gm.transpose() * Am.conjugate();
  return trace_normalized(std::move(out));
}

}  // namespace

int GraphTNS::leg_of(int site_id, int edge_id) const {
  const auto& es = site_edges[site_id];
  for (size_t k = 0; k < es.size(); ++k)
    if (es[k] == edge_id) return int(k);
  throw std::invalid_argument("leg_of: edge not incident to site");
}

GraphTNS GraphTNS::product(std::shared_ptr<const Lattice> lat,
                           const std::vector<Vec>& site_vectors) {
  GraphTNS t;
  t.lat = std::move(lat);
  const int n = t.lat->site_count;
  if (int(site_vectors.size()) != n)
    throw std::invalid_argument("GraphTNS::product: size mismatch");
  t.site_edges.resize(n);
  for (size_t e = 0; e < t.lat->edges.size(); ++e) {
    t.site_edges[t.lat->edges[e].first].push_back(int(e));
    t.site_edges[t.lat->edges[e].second].push_back(int(e));
  }
  t.lambda.assign(t.lat->edges.size(), {1.0});
  t.site.resize(n);
  for (int s = 0; s < n; ++s) {
    t.site[s] = {site_vectors[s][0], site_vectors[s][1]};
  }
  return t;
}

GraphTNS GraphTNS::all_up(std::shared_ptr<const Lattice> lat) {
  Vec up(2);
  up << 1.0, 0.0;
  return product(std::move(lat), std::vector<Vec>(lat ? lat->site_count : 0, up));
}

GraphTNS GraphTNS::all_plus_x(std::shared_ptr<const Lattice> lat) {
  Vec px(2);
  px << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return product(std::move(lat), std::vector<Vec>(lat ? lat->site_count : 0, px));
}

void apply_gate_simple_update(GraphTNS& tns, const Edge& bond, const Mat& gate,
                              int chi_max) {
  if (chi_max < 1) throw std::invalid_argument("simple update: chi_max < 1");
  if (gate.rows() != 4 || gate.cols() != 4)
    throw std::invalid_argument("simple update: gate must be 4x4");
  Edge e = bond.first < bond.second ? bond : Edge{bond.second, bond.first};
  int eid = -1;
  for (size_t i = 0; i < tns.lat->edges.size(); ++i)
    if (tns.lat->edges[i] == e) eid = int(i);
  if (eid < 0) throw std::invalid_argument("simple update: bond is not an edge");
  const int u = e.first, v = e.second;
  const int lu = tns.leg_of(u, eid), lv = tns.leg_of(v, eid);

  // Absorb full environment weights and the bond weight (on the u side).
  auto prep = [&](int s, int shared_leg, bool absorb_bond, Dims& d,
                  std::vector<int>& env_axes) {
    d = site_dims(tns, s);
    std::vector<cx> A = tns.site[s];
    for (size_t k = 0; k < tns.site_edges[s].size(); ++k) {
      if (int(k) == shared_leg) {
        if (absorb_bond) scale_leg(A, d, int(k), tns.lambda[eid]);
        continue;
      }
      scale_leg(A, d, int(k), tns.lambda[tns.site_edges[s][k]]);
    }
    env_axes.clear();
    for (int a = 1; a < 4; ++a)
      if (a != shared_leg + 1) env_axes.push_back(a);
    return A;
  };

  Dims du, dv;
  std::vector<int> env_u, env_v;
  auto Au = prep(u, lu, true, du, env_u);
  auto Av = prep(v, lv, false, dv, env_v);

  // Reduce: rows env, cols (p, shared).
  Mat Mu = fuse(Au, du, env_u, {0, lu + 1});
  Mat Mv = fuse(Av, dv, env_v, {0, lv + 1});
  Mat Qu, Ru, Qv, Rv;
  auto reduce = [](const Mat& m, Mat& q, Mat& r) {
    if (m.rows() >= m.cols()) {
      qr_thin(m, q, r);
    } else {
      q = Mat::Identity(m.rows(), m.rows());
      r = m;
    }
  };
  reduce(Mu, Qu, Ru);
  reduce(Mv, Qv, Rv);

  const int de = tns.edge_dim(eid);
  const int ru = int(Ru.rows()), rv = int(Rv.rows());
  // K[(pu + 2 ru'), (pv + 2 rv')] = sum_a Ru[ru', (pu, a)] Rv[rv', (pv, a)]
  Mat K(2 * ru, 2 * rv);
  for (int pu = 0; pu < 2; ++pu) {
    Mat rup(ru, de);
    for (int a = 0; a < de; ++a) rup.col(a) = Ru.col(pu + 2 * a);
    for (int pv = 0; pv < 2; ++pv) {
      Mat rvp(rv, de);
      for (int a = 0; a < de; ++a) rvp.col(a) = Rv.col(pv + 2 * a);
      Mat blk = rup * rvp.transpose();
      for (int i = 0; i < ru; ++i)
        for (int j = 0; j < rv; ++j) K(pu + 2 * i, pv + 2 * j) = blk(i, j);
    }
  }
  // Apply gate on the fused physical pair (s_u slow bit: s = 2*pu + pv).
  Mat Kg = Mat::Zero(2 * ru, 2 * rv);
  for (int pu = 0; pu < 2; ++pu)
    for (int pv = 0; pv < 2; ++pv)
      for (int qu = 0; qu < 2; ++qu)
        for (int qv = 0; qv < 2; ++qv) {
          cx g = gate(2 * pu + pv, 2 * qu + qv);
          if (g == cx(0, 0)) continue;
          for (int i = 0; i < ru; ++i)
            for (int j = 0; j < rv; ++j)
              Kg(pu + 2 * i, pv + 2 * j) += g * K(qu + 2 * i, qv + 2 * j);
        }

  SplitOptions sopt;
  sopt.chi_max = chi_max;
  sopt.floor = 1e-14 * Kg.norm();
  auto ts = truncated_split(Kg, sopt);
  const int k = int(ts.left.cols());
  double snorm = ts.kept.norm();
  std::vector<double> lam(ts.kept.data(), ts.kept.data() + k);
  for (auto& x : lam) x /= (snorm > 0 ? snorm : 1.0);
  tns.log_norm += std::log(std::max(snorm, 1e-300));

  // Strip the singular values from the right factor; the bond weight lam
  // (plus the log_norm factor) carries them.
  Mat right = ts.right;  // k x (pv + 2 rv)
  for (int i = 0; i < k; ++i) {
    double s = ts.kept[i] > 0 ? 1.0 / ts.kept[i] : 0.0;
    right.row(i) *= s;
  }

  // Expand with the Q factors and divide environment weights back out.
  Mat newU(Mu.rows(), 2 * k);  // rows env, cols (p + 2*new)
  Mat newV(Mv.rows(), 2 * k);
  for (int p = 0; p < 2; ++p) {
    Mat lp(ru, k), rp(rv, k);
    for (int i = 0; i < ru; ++i) lp.row(i) = ts.left.row(p + 2 * i);
    for (int i = 0; i < rv; ++i)
      for (int j = 0; j < k; ++j) rp(i, j) = right(j, p + 2 * i);
    Mat bu = Qu * lp;  // env x k
    Mat bv = Qv * rp;
    for (int j = 0; j < k; ++j) {
      newU.col(p + 2 * j) = bu.col(j);
      newV.col(p + 2 * j) = bv.col(j);
    }
  }

  tns.lambda[eid] = lam;
  Dims ndu = du;
  ndu[lu + 1] = k;
  Dims ndv = dv;
  ndv[lv + 1] = k;
  tns.site[u] = unfuse(newU, ndu, env_u, {0, lu + 1});
  tns.site[v] = unfuse(newV, ndv, env_v, {0, lv + 1});
  for (size_t kk = 0; kk < tns.site_edges[u].size(); ++kk)
    if (int(kk) != lu)
      scale_leg(tns.site[u], ndu, int(kk), inv_floor(tns.lambda[tns.site_edges[u][kk]]));
  for (size_t kk = 0; kk < tns.site_edges[v].size(); ++kk)
    if (int(kk) != lv)
      scale_leg(tns.site[v], ndv, int(kk), inv_floor(tns.lambda[tns.site_edges[v][kk]]));
}

void apply_round_simple_update(GraphTNS& tns, const RoundProgram& prog,
                               int chi_max, bool inverse) {
  auto items = prog.items;
  if (inverse) std::reverse(items.begin(), items.end());
  for (const auto& item : items) {
    if (item.kind == RoundItem::Kind::RX) {
      for (int s = 0; s < tns.n(); ++s) {
        double th = item.angle * (inverse ? -1.0 : 1.0);
        if (!item.site_signs.empty()) th *= item.site_signs[s];
        Mat g = rx_gate(th);
        Dims d = site_dims(tns, s);
        Mat m = fuse(tns.site[s], d, {0}, {1, 2, 3});
        Mat out = g * m;
        tns.site[s] = unfuse(out, d, {0}, {1, 2, 3});
      }
    } else {
      for (size_t i = 0; i < item.layer.bonds.size(); ++i) {
        double th = item.bond_angles[i] * (inverse ? -1.0 : 1.0);
        apply_gate_simple_update(tns, item.layer.bonds[i], zz_gate(th), chi_max);
      }
    }
  }
}

MessageSet bp_messages(const GraphTNS& tns, const BpOptions& opt) {
  MessageSet ms;
  for (size_t e = 0; e < tns.lat->edges.size(); ++e) {
    const auto& [a, b] = tns.lat->edges[e];
    int d = tns.edge_dim(int(e));
    ms.m[{a, b}] = trace_normalized(Mat::Identity(d, d));
    ms.m[{b, a}] = trace_normalized(Mat::Identity(d, d));
  }
  for (int it = 0; it < std::max(1, opt.iterations); ++it) {
    std::map<std::pair<int, int>, Mat> next;
    double resid = 0.0;
    for (size_t e = 0; e < tns.lat->edges.size(); ++e) {
      const auto& [a, b] = tns.lat->edges[e];
      Mat mab = message_step(tns, ms, a, tns.leg_of(a, int(e)));
      Mat mba = message_step(tns, ms, b, tns.leg_of(b, int(e)));
      if (opt.damping > 0) {
        mab = trace_normalized((1 - opt.damping) * mab + opt.damping * ms.m[{a, b}]);
        mba = trace_normalized((1 - opt.damping) * mba + opt.damping * ms.m[{b, a}]);
      }
      resid = std::max(resid, (mab - ms.m[{a, b}]).norm());
      resid = std::max(resid, (mba - ms.m[{b, a}]).norm());
      next[{a, b}] = std::move(mab);
      next[{b, a}] = std::move(mba);
    }
    ms.m = std::move(next);
    ms.residuals.push_back(resid);
    if (resid < opt.tol) {
      ms.converged = true;
      break;
    }
  }
  return ms;
}

std::pair<GraphTNS, MessageSet> bp_regauge(GraphTNS tns, int iters) {
  BpOptions opt;
  opt.iterations = iters;
  auto msgs = bp_messages(tns, opt);

  for (size_t e = 0; e < tns.lat->edges.size(); ++e) {
    const auto& [u, v] = tns.lat->edges[e];
    const int du = tns.leg_of(u, int(e)), dv = tns.leg_of(v, int(e));
    Mat mu = msgs.m.at({u, v});
    Mat mv = msgs.m.at({v, u});
    const int dim = int(mu.rows());

    RVec eu;
    Mat Vu;
    eigh(mu, eu, Vu);
    RVec rt(dim), rti(dim);
    double emax = eu.maxCoeff();
    for (int i = 0; i < dim; ++i) {
      double x = std::max(eu[i], 0.0);
      rt[i] = std::sqrt(x);
      rti[i] = x > 1e-14 * emax ? 1.0 / rt[i] : 0.0;
    }
    Mat K = rt.asDiagonal() * Vu.transpose() * mv * Vu.conjugate() *
            rt.asDiagonal();
    K = 0.5 * (K + K.adjoint()).eval();
    RVec dk;
    Mat R;
    eigh(K, dk, R);
    // descending order
    Mat Rd(dim, dim);
    RVec dd(dim);
    for (int i = 0; i < dim; ++i) {
      Rd.col(i) = R.col(dim - 1 - i);
      dd[i] = std::max(dk[dim - 1 - i], 0.0);
    }
    RVec q4(dim), q4i(dim);
    for (int i = 0; i < dim; ++i) {
      q4[i] = std::pow(std::max(dd[i], 1e-300), 0.25);
      q4i[i] = 1.0 / q4[i];
    }
    // P transforms the u leg, Q = P^{-T} the v leg.
    Mat P = Vu.conjugate() * rti.asDiagonal() * Rd * q4.asDiagonal();
    Mat Q = Vu * rt.asDiagonal() * Rd.conjugate() * q4i.asDiagonal();

    // New bond weights: sqrt of the (descending) eigenvalues, renormalized.
    RVec lam(dim);
    for (int i = 0; i < dim; ++i) lam[i] = std::sqrt(dd[i]);
    double ln = lam.norm();
    if (ln <= 0) ln = 1;

    // Transform the sqrt(lambda)-absorbed legs, then pull the new sqrt out.
    Dims d_u = site_dims(tns, u), d_v = site_dims(tns, v);
    auto Au = tns.site[u];
    scale_leg(Au, d_u, du, sqrt_vec(tns.lambda[e]));
    auto Av = tns.site[v];
    scale_leg(Av, d_v, dv, sqrt_vec(tns.lambda[e]));
    Au = contract_leg(Au, d_u, du + 1, P);
    Av = contract_leg(Av, d_v, dv + 1, Q);
    std::vector<double> lam_new(dim);
    for (int i = 0; i < dim; ++i) lam_new[i] = lam[i] / ln;
    std::vector<double> inv_sqrt(dim);
    for (int i = 0; i < dim; ++i) {
      double s = std::sqrt(lam_new[i]);
      inv_sqrt[i] = s > 1e-300 ? 1.0 / s : 0.0;
    }
    scale_leg(Au, d_u, du, inv_sqrt);
    scale_leg(Av, d_v, dv, inv_sqrt);
    // The leading ln factor keeps the state value unchanged:
    // A_u A_v = T_u lam_new T_v * ln ... fold ln into log_norm.
    tns.log_norm += std::log(ln);
    tns.site[u] = std::move(Au);
    tns.site[v] = std::move(Av);
    tns.lambda[e] = std::move(lam_new);
  }

  BpOptions post;
  post.iterations = 8;
  auto fresh = bp_messages(tns, post);
  fresh.residuals = msgs.residuals;  // report the pre-gauge iteration history
  fresh.converged = msgs.converged;
  return {std::move(tns), std::move(fresh)};
}

double local_expectation(const GraphTNS& tns, const MessageSet& msgs,
                         const PauliString& p) {
  static const Mat sig[4] = {
      (Mat(2, 2) << 1, 0, 0, 1).finished(),
      (Mat(2, 2) << 0, 1, 1, 0).finished(),
      (Mat(2, 2) << 0, cx(0, -1), cx(0, 1), 0).finished(),
      (Mat(2, 2) << 1, 0, 0, -1).finished()};
  auto support = p.support();
  if (support.empty()) return p.phase().real();
  if (support.size() > 2)
    throw std::invalid_argument("local_expectation: support larger than one edge");

  auto env_contracted = [&](int s, int skip_leg, Dims& d) {
    auto A = sqrt_absorbed(tns, s, d);
    for (size_t k = 0; k < tns.site_edges[s].size(); ++k) {
      if (int(k) == skip_leg) continue;
      int e = tns.site_edges[s][k];
      int w = other_end(tns.lat->edges[e], s);
      A = contract_leg(A, d, int(k) + 1, msgs.m.at({w, s}));
    }
    return A;
  };

  if (support.size() == 1) {
    int s = support[0];
    Dims dg, da;
    auto G = env_contracted(s, -1, dg);
    auto A = sqrt_absorbed(tns, s, da);
    Mat Gm = fuse(G, dg, {1, 2, 3}, {0});
    Mat Am = fuse(A, da, {1, 2, 3}, {0});
    Mat M = Gm.transpose() * Am.conjugate();  // M[p, p']
    Mat op = p.phase().real() * sig[int(p.letters[s])];
    cx num = (M * op.transpose()).trace();
    cx den = M.trace();
    return (num / den).real();
  }

  int a = support[0], b = support[1];
  int eid = -1;
  for (size_t i = 0; i < tns.lat->edges.size(); ++i)
    if (tns.lat->edges[i] == Edge{std::min(a, b), std::max(a, b)}) eid = int(i);
  if (eid < 0)
    throw std::invalid_argument("local_expectation: support sites not adjacent");
  const auto& [u, v] = tns.lat->edges[eid];
  const int lu = tns.leg_of(u, eid), lv = tns.leg_of(v, eid);

  auto halves = [&](int s, int shared) {
    Dims dg, da;
    auto G = env_contracted(s, shared, dg);
    auto A = sqrt_absorbed(tns, s, da);
    std::vector<int> env;
    for (int ax = 1; ax < 4; ++ax)
      if (ax != shared + 1) env.push_back(ax);
    Mat Gm = fuse(G, dg, env, {0, shared + 1});
    Mat Am = fuse(A, da, env, {0, shared + 1});
    // H[(p b), (p' b')]
    Mat H = Gm.transpose() * Am.conjugate();
    return H;
  };
  Mat Hu = halves(u, lu), Hv = halves(v, lv);
  const int de = tns.edge_dim(eid);

  auto pair_sum = [&](const Mat& su, const Mat& sv) {
    cx total = 0;
    for (int pu = 0; pu < 2; ++pu)
      for (int puu = 0; puu < 2; ++puu) {
        if (su(puu, pu) == cx(0, 0)) continue;
        for (int pv = 0; pv < 2; ++pv)
          for (int pvv = 0; pvv < 2; ++pvv) {
            if (sv(pvv, pv) == cx(0, 0)) continue;
            cx block = 0;
            for (int x = 0; x < de; ++x)
              for (int y = 0; y < de; ++y)
                block += Hu(pu + 2 * x, puu + 2 * y) * Hv(pv + 2 * x, pvv + 2 * y);
            total += su(puu, pu) * sv(pvv, pv) * block;
          }
      }
    return total;
  };
  Mat su = sig[int(p.letters[u])];
  Mat sv = sig[int(p.letters[v])];
  cx num = p.phase() * pair_sum(su, sv);
  cx den = pair_sum(sig[0], sig[0]);
  return (num / den).real();
}

std::vector<EchoPoint> stabilizer_echo_experiment(
    const Lattice& lat, const std::vector<double>& theta_grid,
    const std::vector<int>& depths, int chi_max, EchoMode mode) {
  auto latp = std::make_shared<Lattice>(lat);
  auto order = snake_order(lat);
  auto layers = layer_bonds(lat, order);
  int detector = lat.labels.count("detector") ? lat.labels.at("detector") : 0;

  std::vector<EchoPoint> out;
  for (double theta : theta_grid) {
    CircuitSpec fwd;
    fwd.theta_j = -3.14159265358979323846 / 2;
    fwd.theta_h = theta;
    fwd.lattice = latp;
    auto fprog = build_round(fwd, layers);
    CircuitSpec bwd = fwd;
    bwd.theta_h = 3.14159265358979323846 / 2;
    auto bprog = build_round(bwd, layers);
    for (int D : depths) {
      GraphTNS tns = GraphTNS::all_up(latp);
      for (int d = 0; d < D; ++d) apply_round_simple_update(tns, fprog, chi_max);
      int bwd_chi = mode == EchoMode::TruncateBoth ? chi_max : 4 * chi_max;
      for (int d = 0; d < D; ++d)
        apply_round_simple_update(tns, bprog, bwd_chi, true);
      BpOptions bopt;
      bopt.iterations = 30;
      auto msgs = bp_messages(tns, bopt);
      double val = local_expectation(
          tns, msgs, PauliString::single(lat.site_count, detector, PauliLetter::Z));
      out.push_back({theta, D, val});
    }
  }
  return out;
}

std::vector<std::vector<double>> double_slit_experiment(
    const Lattice& lat, const std::vector<int>& sites, int depth, bool flux_pi,
    int chi_max, int bp_iters) {
  auto latp = std::make_shared<Lattice>(lat);
  CircuitSpec spec;
  spec.theta_j = -3.14159265358979323846 / 4;
  spec.theta_h = 3.14159265358979323846 / 2;
  spec.lattice = latp;
  if (flux_pi) {
    if (!lat.labels.count("flux_a") || !lat.labels.count("flux_b"))
      throw std::invalid_argument("double_slit: lattice has no flux bond labels");
    spec.flux_bond = Edge{lat.labels.at("flux_a"), lat.labels.at("flux_b")};
  }
  spec.check();
  auto order = snake_order(lat);
  auto layers = layer_bonds(lat, order);
  auto prog = build_round(spec, layers);

  int source = lat.labels.count("source") ? lat.labels.at("source") : 0;
  std::vector<Vec> vecs;
  Vec px(2), mx(2);
  px << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  mx << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);  // Z|+x>
  for (int s = 0; s < lat.site_count; ++s) vecs.push_back(s == source ? mx : px);
  GraphTNS tns = GraphTNS::product(latp, vecs);

  std::vector<std::vector<double>> table;
  auto measure = [&] {
    auto [gauged, msgs] = bp_regauge(tns, bp_iters);
    std::vector<double> row;
    for (int s : sites)
      row.push_back(local_expectation(
          gauged, msgs, PauliString::single(lat.site_count, s, PauliLetter::X)));
    table.push_back(std::move(row));
  };
  measure();
  for (int d = 0; d < depth; ++d) {
    apply_round_simple_update(tns, prog, chi_max);
    measure();
  }
  return table;
}

}  // namespace hexmpo
