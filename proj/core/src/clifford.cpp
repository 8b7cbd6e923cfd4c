#include "hexmpo/clifford.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "hexmpo/dense.hpp"

namespace hexmpo {

namespace {

// Left-multiply P by the single-site letter at `site`, tracking the phase.
void mul_letter(PauliString& p, int site, PauliLetter letter) {
  static constexpr uint8_t kPhase[4][4] = {
      {0, 0, 0, 0}, {0, 0, 1, 3}, {0, 3, 0, 1}, {0, 1, 3, 0}};
  int a = int(letter), b = int(p.letters[site]);
  p.phase_exp = uint8_t((p.phase_exp + kPhase[a][b]) % 4);
  p.letters[site] = PauliLetter(a ^ b);
}

// Conjugate by exp(-i theta ZZ / 2) on (a, b); theta = q * pi/2 exactly.
void conj_zz(PauliString& p, int a, int b, int q, StringDirection dir) {
  q &= 3;
  if (q == 0) return;
  const bool xa = p.letters[a] == PauliLetter::X || p.letters[a] == PauliLetter::Y;
  const bool xb = p.letters[b] == PauliLetter::X || p.letters[b] == PauliLetter::Y;
  if (xa == xb) return;  // commutes with ZZ
  if (q == 2) {
    p.phase_exp = uint8_t((p.phase_exp + 2) % 4);
    return;
  }
  // Schroedinger: P -> (cos t - i sin t ZZ) P; Heisenberg flips the sign of t.
  int ph;
  if (dir == StringDirection::Schroedinger)
    ph = (q == 1) ? 3 : 1;  // -i or +i
  else
    ph = (q == 1) ? 1 : 3;
  p.phase_exp = uint8_t((p.phase_exp + ph) % 4);
  mul_letter(p, a, PauliLetter::Z);
  mul_letter(p, b, PauliLetter::Z);
}

void conj_rx(PauliString& p, int a, int q, StringDirection dir) {
  q &= 3;
  if (q == 0) return;
  const bool anti =
      p.letters[a] == PauliLetter::Y || p.letters[a] == PauliLetter::Z;
  if (!anti) return;
  if (q == 2) {
    p.phase_exp = uint8_t((p.phase_exp + 2) % 4);
    return;
  }
  int ph;
  if (dir == StringDirection::Schroedinger)
    ph = (q == 1) ? 3 : 1;
  else
    ph = (q == 1) ? 1 : 3;
  p.phase_exp = uint8_t((p.phase_exp + ph) % 4);
  mul_letter(p, a, PauliLetter::X);
}

void conj_item(PauliString& p, const RoundItem& item, StringDirection dir) {
  if (item.kind == RoundItem::Kind::RX) {
    for (int s = 0; s < p.size(); ++s) {
      double th = item.angle;
      if (!item.site_signs.empty()) th *= item.site_signs[s];
      int q = 0;
      if (!is_clifford_angle(th, &q))
        throw std::invalid_argument("clifford conjugation: non-Clifford theta_h");
      conj_rx(p, s, q, dir);
    }
  } else {
    for (size_t i = 0; i < item.layer.bonds.size(); ++i) {
      int q = 0;
      if (!is_clifford_angle(item.bond_angles[i], &q))
        throw std::invalid_argument("clifford conjugation: non-Clifford theta_J");
      conj_zz(p, item.layer.bonds[i].first, item.layer.bonds[i].second, q, dir);
    }
  }
}

}  // namespace

PauliString conjugate_by_round(const PauliString& p, const CircuitSpec& spec,
                               StringDirection dir) {
  spec.check();
  if (p.size() != spec.lattice->site_count)
    throw std::invalid_argument("conjugate_by_round: string/lattice size mismatch");
  auto order = snake_order(*spec.lattice);
  auto layers = layer_bonds(*spec.lattice, order);
  auto prog = build_round(spec, layers);
  PauliString out = p;
  if (dir == StringDirection::Schroedinger) {
    for (const auto& item : prog.items) conj_item(out, item, dir);
  } else {
    for (auto it = prog.items.rbegin(); it != prog.items.rend(); ++it)
      conj_item(out, *it, dir);
  }
  return out;
}

PauliString stabilizer(const Lattice& lat, int site, int depth) {
  if (depth < 0) throw std::invalid_argument("stabilizer: depth < 0");
  CircuitSpec spec;
  spec.theta_j = -3.14159265358979323846 / 2;
  spec.theta_h = 3.14159265358979323846 / 2;
  spec.depth = depth;
  spec.lattice = std::make_shared<Lattice>(lat);
  PauliString p = PauliString::single(lat.site_count, site, PauliLetter::Z);
  for (int d = 0; d < depth; ++d)
    p = conjugate_by_round(p, spec, StringDirection::Schroedinger);
  return p;
}

std::vector<int> support_growth(const Lattice& lat, int site, int depth,
                                const CircuitSpec& spec, StringDirection dir) {
  PauliString p = PauliString::single(lat.site_count, site, PauliLetter::Z);
  std::vector<int> sizes{p.weight()};
  for (int d = 0; d < depth; ++d) {
    p = conjugate_by_round(p, spec, dir);
    sizes.push_back(p.weight());
  }
  return sizes;
}

SOperator s_operator(const Lattice& lat, int site) {
  if (site < 0 || site >= lat.site_count)
    throw std::invalid_argument("s_operator: site out of range");
  SOperator s;
  s.site = site;
  for (const auto& [a, b] : lat.edges) {
    if (a == site) s.neighbors.push_back(b);
    if (b == site) s.neighbors.push_back(a);
  }
  std::sort(s.neighbors.begin(), s.neighbors.end());
  s.string = PauliString::identity(lat.site_count);
  for (int b : s.neighbors) {
    PauliString zz = PauliString::identity(lat.site_count);
    zz.phase_exp = 1;  // i Z_site Z_b
    zz.letters[site] = PauliLetter::Z;
    zz.letters[b] = PauliLetter::Z;
    s.string = zz * s.string;
  }
  return s;
}

double verify_commutation(const Lattice& lat, int site, double theta_h, int n) {
  if (lat.site_count > 12)
    throw std::invalid_argument("verify_commutation: dense check limited to 12 sites");
  const int N = lat.site_count;
  const double theta_j = -3.14159265358979323846 / 2;

  // S_a^n as an exact string, then T = X_a * S_a^n.
  auto s = s_operator(lat, site);
  PauliString sn = PauliString::identity(N);
  for (int k = 0; k < (n & 3); ++k) sn = s.string * sn;
  PauliString t = PauliString::single(N, site, PauliLetter::X) * sn;
  if (!t.is_hermitian())
    throw std::logic_error("verify_commutation: X_a S_a^n not hermitian");

  const double c = std::cos(theta_h / 2), sn_half = std::sin(theta_h / 2);
  auto apply_rzz_n = [&](StateVector& psi) {
    if (n == 0) return;
    for (const auto& [a, b] : lat.edges) psi.apply_zz(a, b, theta_j * n);
  };

  double dev = 0.0;
  for (size_t col = 0; col < (size_t(1) << N); ++col) {
    StateVector e(N);
    e.amps()[col] = 1.0;

    StateVector lhs = e;  // (R_ZZ)^n e^{-i th X_a/2}
    lhs.apply_rx(site, theta_h);
    apply_rzz_n(lhs);

    StateVector rhs = e;  // e^{-i th (X_a S_a^n)/2} (R_ZZ)^n
    apply_rzz_n(rhs);
    StateVector tpsi = rhs;
    tpsi.apply_pauli(t);
    for (size_t i = 0; i < rhs.amps().size(); ++i)
      rhs.amps()[i] = c * rhs.amps()[i] + cx(0, -sn_half) * tpsi.amps()[i];

    for (size_t i = 0; i < rhs.amps().size(); ++i)
      dev = std::max(dev, std::abs(lhs.amps()[i] - rhs.amps()[i]));
  }
  return dev;
}

}  // namespace hexmpo
