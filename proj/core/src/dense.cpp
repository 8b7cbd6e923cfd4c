#include "hexmpo/dense.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace hexmpo {

StateVector::StateVector(int n) : n_(n) {
  if (n < 1 || n > kMaxQubits)
    throw std::invalid_argument(
        fmt::format("statevector: {} qubits outside [1,{}]", n, kMaxQubits));
  amps_.assign(size_t(1) << n, cx(0, 0));
}

StateVector StateVector::all_up(int n) {
  StateVector psi(n);
  psi.amps_[0] = 1.0;
  return psi;
}

StateVector StateVector::all_plus_x(int n) {
  StateVector psi(n);
  const double a = std::pow(2.0, -0.5 * n);
  for (auto& x : psi.amps_) x = a;
  return psi;
}

void StateVector::apply_single_qubit(int site, const Mat& gate) {
  const size_t mask = size_t(1) << site;
  const cx g00 = gate(0, 0), g01 = gate(0, 1), g10 = gate(1, 0), g11 = gate(1, 1);
  const size_t lo_mask = mask - 1, hi_mask = ~lo_mask;
  const size_t half = amps_.size() >> 1;
  for (size_t i = 0; i < half; ++i) {
    const size_t i0 = ((i & hi_mask) << 1) | (i & lo_mask);
    const size_t i1 = i0 | mask;
    const cx a = amps_[i0], b = amps_[i1];
    amps_[i0] = g00 * a + g01 * b;
    amps_[i1] = g10 * a + g11 * b;
  }
}

void StateVector::apply_rx(int site, double theta) {
  apply_single_qubit(site, rx_gate(theta));
}

void StateVector::apply_zz(int a, int b, double theta) {
  const size_t ma = size_t(1) << a, mb = size_t(1) << b;
  const cx minus = std::exp(cx(0, -theta / 2));
  const cx plus = std::exp(cx(0, theta / 2));
  for (size_t i = 0; i < amps_.size(); ++i) {
    const bool par = bool(i & ma) != bool(i & mb);
    amps_[i] *= par ? plus : minus;
  }
}

void StateVector::apply_pauli(const PauliString& p) {
  if (p.size() != n_) throw std::invalid_argument("apply_pauli: size mismatch");
  size_t flip = 0;
  // phase(i) accumulated per basis state: X: none; Z: (-1)^bit; Y: i*(-1)^bit with flip
  std::vector<int> zsites, ysites;
  for (int s = 0; s < n_; ++s) {
    switch (p.letters[s]) {
      case PauliLetter::I: break;
      case PauliLetter::X: flip |= size_t(1) << s; break;
      case PauliLetter::Y: flip |= size_t(1) << s; ysites.push_back(s); break;
      case PauliLetter::Z: zsites.push_back(s); break;
    }
  }
  std::vector<cx> out(amps_.size());
  const cx global = p.phase();
  for (size_t i = 0; i < amps_.size(); ++i) {
    // P|i> = phase_i |i ^ flip>
    cx ph = global;
    for (int s : zsites) ph *= (i & (size_t(1) << s)) ? -1.0 : 1.0;
    for (int s : ysites)
      ph *= (i & (size_t(1) << s)) ? cx(0, -1) : cx(0, 1);
    out[i ^ flip] = ph * amps_[i];
  }
  amps_ = std::move(out);
}

void StateVector::apply_item(const RoundItem& item, bool inverse) {
  if (item.kind == RoundItem::Kind::RX) {
    const double th = inverse ? -item.angle : item.angle;
    for (int s = 0; s < n_; ++s) {
      double sth = th;
      if (!item.site_signs.empty()) sth *= item.site_signs[s];
      if (sth != 0.0) apply_rx(s, sth);
    }
  } else {
    for (size_t i = 0; i < item.layer.bonds.size(); ++i) {
      const auto& [a, b] = item.layer.bonds[i];
      apply_zz(a, b, inverse ? -item.bond_angles[i] : item.bond_angles[i]);
    }
  }
}

void StateVector::apply_round(const RoundProgram& prog) {
  for (const auto& item : prog.items) apply_item(item, false);
}

void StateVector::apply_round_inverse(const RoundProgram& prog) {
  for (auto it = prog.items.rbegin(); it != prog.items.rend(); ++it)
    apply_item(*it, true);
}

double StateVector::norm() const {
  double s = 0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

cx StateVector::inner(const StateVector& other) const {
  if (other.n_ != n_) throw std::invalid_argument("inner: size mismatch");
  cx s = 0;
  for (size_t i = 0; i < amps_.size(); ++i)
    s += std::conj(amps_[i]) * other.amps_[i];
  return s;
}

double StateVector::expect_pauli(const PauliString& p) const {
  if (!p.is_hermitian())
    throw std::invalid_argument("expect_pauli: string is not hermitian");
  StateVector tmp = *this;
  tmp.apply_pauli(p);
  cx v = inner(tmp);
  return v.real();
}

double StateVector::expect_z(int site) const {
  double s = 0;
  const size_t m = size_t(1) << site;
  for (size_t i = 0; i < amps_.size(); ++i)
    s += (i & m ? -1.0 : 1.0) * std::norm(amps_[i]);
  return s;
}

double StateVector::expect_x(int site) const {
  const size_t m = size_t(1) << site;
  cx s = 0;
  for (size_t i = 0; i < amps_.size(); ++i)
    s += std::conj(amps_[i]) * amps_[i ^ m];
  return s.real();
}

StateVector evolve(StateVector psi, const CircuitSpec& spec) {
  spec.check();
  const auto& lat = *spec.lattice;
  if (lat.site_count != psi.n())
    throw std::invalid_argument("evolve: lattice/state size mismatch");
  auto order = snake_order(lat);
  auto layers = layer_bonds(lat, order);
  auto prog = build_round(spec, layers);
  for (int d = 0; d < spec.depth; ++d) psi.apply_round(prog);
  if (auto extra = trailing_rx(spec)) psi.apply_item(*extra, false);
  return psi;
}

double double_slit(const Lattice& lat, int source, int probe, int depth,
                   bool flux_pi) {
  auto rows = double_slit_table(lat, source, {probe}, depth, flux_pi);
  return rows.back()[0];
}

std::vector<std::vector<double>> double_slit_table(const Lattice& lat,
                                                   int source,
                                                   const std::vector<int>& sites,
                                                   int depth, bool flux_pi) {
  CircuitSpec spec;
  spec.theta_j = -3.14159265358979323846 / 4;
  spec.theta_h = 3.14159265358979323846 / 2;
  spec.depth = depth;
  spec.lattice = std::make_shared<Lattice>(lat);
  if (flux_pi) {
    auto a = lat.labels.find("flux_a");
    auto b = lat.labels.find("flux_b");
    if (a == lat.labels.end() || b == lat.labels.end())
      throw std::invalid_argument("double_slit: lattice has no flux bond labels");
    spec.flux_bond = Edge{a->second, b->second};
  }
  spec.check();

  auto order = snake_order(lat);
  auto layers = layer_bonds(lat, order);
  auto prog = build_round(spec, layers);

  StateVector psi = StateVector::all_plus_x(lat.site_count);
  psi.apply_pauli(PauliString::single(lat.site_count, source, PauliLetter::Z));

  std::vector<std::vector<double>> table;
  auto snap = [&] {
    std::vector<double> row;
    for (int s : sites) row.push_back(psi.expect_x(s));
    table.push_back(std::move(row));
  };
  snap();
  for (int d = 0; d < depth; ++d) {
    psi.apply_round(prog);
    snap();
  }
  return table;
}

}  // namespace hexmpo
