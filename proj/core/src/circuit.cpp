#include "hexmpo/circuit.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace hexmpo {

namespace {

constexpr double kPi = 3.14159265358979323846;

int color_of(const Lattice& lat, const Edge& e) {
  for (int g = 0; g < 3; ++g)
    for (const auto& f : lat.color_groups[g])
      if (f == e) return g;
  return -1;
}

}  // namespace

void CircuitSpec::check() const {
  if (depth < 0) throw std::invalid_argument("circuit: depth < 0");
  if (!lattice) throw std::invalid_argument("circuit: no lattice");
  if (!std::isfinite(theta_j) || !std::isfinite(theta_h))
    throw std::invalid_argument("circuit: non-finite angle");
  if (flux_bond) {
    Edge e = *flux_bond;
    if (e.first > e.second) std::swap(e.first, e.second);
    if (!lattice->has_edge(e.first, e.second))
      throw std::invalid_argument(
          fmt::format("circuit: flux bond ({},{}) is not a lattice edge",
                      e.first, e.second));
  }
}

Variant variant_from_string(const std::string& s) {
  if (s == "standard") return Variant::Standard;
  if (s == "non_commuting") return Variant::NonCommuting;
  if (s == "extra_final_rx") return Variant::ExtraFinalRx;
  throw std::invalid_argument(fmt::format("unknown circuit variant '{}'", s));
}

std::string variant_to_string(Variant v) {
  switch (v) {
    case Variant::Standard: return "standard";
    case Variant::NonCommuting: return "non_commuting";
    default: return "extra_final_rx";
  }
}

RoundProgram build_round(const CircuitSpec& spec,
                         const std::vector<GateLayer>& layers) {
  spec.check();
  const auto& lat = *spec.lattice;
  RoundProgram prog;
  prog.n_sites = lat.site_count;

  auto zz_item = [&](const GateLayer& layer) {
    RoundItem it;
    it.kind = RoundItem::Kind::ZZ;
    it.layer = layer;
    for (const auto& b : layer.bonds) {
      double th = spec.theta_j;
      if (spec.flux_bond) {
        Edge f = *spec.flux_bond;
        if (f.first > f.second) std::swap(f.first, f.second);
        if (b == f) th = -th;
      }
      it.bond_angles.push_back(th);
    }
    return it;
  };
  auto rx_item = [&] {
    RoundItem it;
    it.kind = RoundItem::Kind::RX;
    it.angle = spec.theta_h;
    return it;
  };

  if (spec.variant == Variant::NonCommuting) {
    // One RX round per color group ("sprinkled" single-qubit gates).
    for (int g = 0; g < 3; ++g) {
      prog.items.push_back(rx_item());
      for (const auto& layer : layers) {
        if (layer.bonds.empty()) continue;
        if (color_of(lat, layer.bonds.front()) == g)
          prog.items.push_back(zz_item(layer));
      }
    }
  } else {
    prog.items.push_back(rx_item());
    for (const auto& layer : layers) prog.items.push_back(zz_item(layer));
  }
  return prog;
}

std::optional<RoundItem> trailing_rx(const CircuitSpec& spec) {
  if (spec.variant != Variant::ExtraFinalRx) return std::nullopt;
  RoundItem it;
  it.kind = RoundItem::Kind::RX;
  it.angle = spec.theta_h;
  return it;
}

Mat rx_gate(double theta) {
  Mat g(2, 2);
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  g << cx(c, 0), cx(0, -s), cx(0, -s), cx(c, 0);
  return g;
}

Mat zz_gate(double theta) {
  Mat g = Mat::Zero(4, 4);
  const cx minus = std::exp(cx(0, -theta / 2));
  const cx plus = std::exp(cx(0, theta / 2));
  g(0, 0) = minus;   // |00>
  g(1, 1) = plus;    // |01>
  g(2, 2) = plus;    // |10>
  g(3, 3) = minus;   // |11>
  return g;
}

Mat doubled_gate(const Mat& v, ConjDirection dir) {
  const int d = int(v.rows());
  Mat m(d * d, d * d);
  for (int s = 0; s < d; ++s)
    for (int sp = 0; sp < d; ++sp)
      for (int t = 0; t < d; ++t)
        for (int tp = 0; tp < d; ++tp) {
          cx val = dir == ConjDirection::Heisenberg
                       ? std::conj(v(t, s)) * v(tp, sp)    // O -> V^dag O V
                       : v(s, t) * std::conj(v(sp, tp));   // O -> V O V^dag
          m(d * s + sp, d * t + tp) = val;
        }
  return m;
}

namespace {

// Operator-Schmidt pieces of a two-site gate acting on per-site physical
// dimension D (2 pure, 4 doubled). Returns left piece (D*D x r) and right
// piece (r x D*D) with row/col index fused as out*D + in.
void schmidt_pieces(const Mat& two_site, int D, Mat& left, Mat& right) {
  Mat k(D * D, D * D);
  const int d1 = D;  // per-site dim
  // two_site row index fuses (site1, site2) with site1 slow.
  for (int a1 = 0; a1 < d1; ++a1)
    for (int a2 = 0; a2 < d1; ++a2)
      for (int b1 = 0; b1 < d1; ++b1)
        for (int b2 = 0; b2 < d1; ++b2)
          k(a1 * D + b1, a2 * D + b2) = two_site(a1 * d1 + a2, b1 * d1 + b2);
  auto dec = svd(k);
  int r = 0;
  const double floor = 1e-14 * (dec.s.size() ? dec.s[0] : 0.0);
  while (r < dec.s.size() && dec.s[r] > floor) ++r;
  r = std::max(r, 1);
  left = dec.u.leftCols(r);
  right = dec.vh.topRows(r);
  for (int i = 0; i < r; ++i) {
    const double sq = std::sqrt(dec.s[i]);
    left.col(i) *= sq;
    right.row(i) *= sq;
  }
}

Mat two_site_zz(double theta, bool doubled, ConjDirection dir) {
  Mat g = zz_gate(theta);
  if (!doubled) return g;
  return doubled_gate(g, dir);
}

}  // namespace

CompiledLayer compile_zz_layer(const GateLayer& layer, double theta_j,
                               bool doubled, int n_sites,
                               const SnakeOrder& order, ConjDirection dir,
                               const std::vector<double>* bond_angles) {
  const int D = doubled ? 4 : 2;
  CompiledLayer out;
  out.phys_dim = D;
  out.tag = "zz";
  out.tensors.assign(n_sites, MpoTensor::identity(D));
  std::vector<char> used(n_sites, 0);

  for (size_t i = 0; i < layer.bonds.size(); ++i) {
    const auto& [sa, sb] = layer.bonds[i];
    int p = order.position[sa], q = order.position[sb];
    int lo = std::min(p, q), hi = std::max(p, q);
    for (int x = lo; x <= hi; ++x) {
      if (used[x])
        throw std::invalid_argument("compile_zz_layer: overlapping bond spans");
      used[x] = 1;
    }
    double th = bond_angles ? (*bond_angles)[i] : theta_j;
    Mat left, right;
    schmidt_pieces(two_site_zz(th, doubled, dir), D, left, right);
    const int r = int(left.cols());
    out.max_bond = std::max(out.max_bond, r);

    MpoTensor wl(1, D, r);
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b)
        for (int k = 0; k < r; ++k) wl.at(0, a, b, k) = left(a * D + b, k);
    out.tensors[lo] = std::move(wl);

    for (int x = lo + 1; x < hi; ++x) {
      MpoTensor wm(r, D, r);
      for (int k = 0; k < r; ++k)
        for (int pph = 0; pph < D; ++pph) wm.at(k, pph, pph, k) = 1.0;
      out.tensors[x] = std::move(wm);
    }

    MpoTensor wr(r, D, 1);
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b)
        for (int k = 0; k < r; ++k) wr.at(k, a, b, 0) = right(k, a * D + b);
    out.tensors[hi] = std::move(wr);
  }
  return out;
}

CompiledLayer compile_rx_layer(double theta_h, bool doubled, int n_sites,
                               const SnakeOrder& order, ConjDirection dir,
                               const std::vector<int>& site_signs,
                               const std::vector<char>* active) {
  const int D = doubled ? 4 : 2;
  CompiledLayer out;
  out.phys_dim = D;
  out.tag = "rx";
  out.tensors.reserve(n_sites);
  for (int pos = 0; pos < n_sites; ++pos) {
    int site = order.site[pos];
    if (active && !(*active)[site]) {
      out.tensors.push_back(MpoTensor::identity(D));
      continue;
    }
    double th = theta_h;
    if (!site_signs.empty()) th *= site_signs[site];
    Mat g = rx_gate(th);
    if (doubled) g = doubled_gate(g, dir);
    MpoTensor w(1, D, 1);
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b) w.at(0, a, b, 0) = g(a, b);
    out.tensors.push_back(std::move(w));
  }
  return out;
}

bool is_clifford_angle(double theta, int* quarter_turns) {
  double q = theta / (kPi / 2);
  double qr = std::round(q);
  if (std::abs(q - qr) > 1e-9) return false;
  if (quarter_turns) *quarter_turns = int(std::llround(qr)) & 3;
  return true;
}

}  // namespace hexmpo
