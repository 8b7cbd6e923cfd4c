#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hexmpo/lattice.hpp"
#include "hexmpo/tensor_train.hpp"

namespace hexmpo {

enum class Variant { Standard, NonCommuting, ExtraFinalRx };

/// One kicked-Ising round:
///   U(theta_J, theta_h) = [prod_bonds exp(-i theta_J ZZ/2)]
///                         [prod_sites exp(-i theta_h X/2)]
/// i.e. the X rotations hit the state first. Angles follow this sign
/// convention throughout; theta_J = -pi/2 is the Clifford two-qubit point.
struct CircuitSpec {
  double theta_j = -1.5707963267948966;
  double theta_h = 0.0;
  int depth = 0;
  Variant variant = Variant::Standard;
  std::optional<Edge> flux_bond;  // this bond's ZZ angle is negated
  std::shared_ptr<const Lattice> lattice;

  void check() const;
};

Variant variant_from_string(const std::string& s);
std::string variant_to_string(Variant v);

struct RoundItem {
  enum class Kind { ZZ, RX } kind = Kind::RX;
  GateLayer layer;                  // ZZ only
  std::vector<double> bond_angles;  // ZZ only, flux already folded in
  double angle = 0.0;               // RX only
  std::vector<int> site_signs;      // RX only; empty = all +1
};

/// Items listed in application (circuit-time) order. Standard rounds apply
/// the RX layer and then the scheduled ZZ layers; the non-commuting variant
/// repeats the RX layer before each color group so single-qubit gates
/// triple on the three-colorable heavy-hex bond structure.
struct RoundProgram {
  std::vector<RoundItem> items;
  int n_sites = 0;
};

RoundProgram build_round(const CircuitSpec& spec,
                         const std::vector<GateLayer>& layers);

/// The ExtraFinalRx variant appends one more RX layer after the last round.
std::optional<RoundItem> trailing_rx(const CircuitSpec& spec);

/// Direction of a doubled (superoperator) gate layer acting on vectorized
/// operators: Heisenberg maps O -> V^dag O V, Schroedinger maps O -> V O V^dag.
enum class ConjDirection { Heisenberg, Schroedinger };

Mat rx_gate(double theta);                 // 2x2, exp(-i theta X / 2)
Mat zz_gate(double theta);                 // 4x4 diagonal, exp(-i theta ZZ / 2)
Mat doubled_gate(const Mat& v, ConjDirection dir);  // d^2 x d^2 superoperator

/// Compile a scheduled ZZ layer to a tensor-train operator: identity
/// pass-through outside the bond spans, operator-Schmidt pieces inside.
/// Bond dimension <= 2 (pure) or <= 4 (doubled) at every cut.
CompiledLayer compile_zz_layer(const GateLayer& layer, double theta_j,
                               bool doubled, int n_sites,
                               const SnakeOrder& order,
                               ConjDirection dir = ConjDirection::Heisenberg,
                               const std::vector<double>* bond_angles = nullptr);

/// chi = 1 layer of single-site X rotations; `active` (by site id) limits
/// the rotated sites when lightcone reduction is on (empty = all sites).
CompiledLayer compile_rx_layer(double theta_h, bool doubled, int n_sites,
                               const SnakeOrder& order,
                               ConjDirection dir = ConjDirection::Heisenberg,
                               const std::vector<int>& site_signs = {},
                               const std::vector<char>* active = nullptr);

/// Whether an angle sits on the Clifford grid (integer multiple of pi/2).
bool is_clifford_angle(double theta, int* quarter_turns = nullptr);

}  // namespace hexmpo
