#pragma once

#include <vector>

#include "hexmpo/circuit.hpp"
#include "hexmpo/pauli.hpp"

namespace hexmpo {

/// Dense statevector for up to 24 qubits. Site i maps to bit i of the
/// basis index; |up> = |0>.
class StateVector {
 public:
  static constexpr int kMaxQubits = 24;

  explicit StateVector(int n);
  static StateVector all_up(int n);
  static StateVector all_plus_x(int n);

  int n() const { return n_; }
  std::vector<cx>& amps() { return amps_; }
  const std::vector<cx>& amps() const { return amps_; }

  void apply_single_qubit(int site, const Mat& gate);
  void apply_rx(int site, double theta);
  void apply_zz(int a, int b, double theta);
  void apply_pauli(const PauliString& p);

  void apply_round(const RoundProgram& prog);
  void apply_round_inverse(const RoundProgram& prog);
  void apply_item(const RoundItem& item, bool inverse);

  double norm() const;
  cx inner(const StateVector& other) const;
  double expect_pauli(const PauliString& p) const;
  double expect_z(int site) const;
  double expect_x(int site) const;

 private:
  int n_;
  std::vector<cx> amps_;
};

/// Applies `spec.depth` rounds of the kicked-Ising circuit.
StateVector evolve(StateVector psi, const CircuitSpec& spec);

/// Double-slit correlator C_ij(D) = <-> | Z_i V^-D X_j V^D Z_i | ->> with
/// V = U(-pi/4, pi/2); returns the X magnetization of `probe` after
/// flipping `source` in the all-+x state and evolving D rounds.
double double_slit(const Lattice& lat, int source, int probe, int depth,
                   bool flux_pi);

/// Full per-depth, per-site X-magnetization table for the double-slit
/// experiment; rows are depths 0..depth, columns the requested sites.
std::vector<std::vector<double>> double_slit_table(const Lattice& lat,
                                                   int source,
                                                   const std::vector<int>& sites,
                                                   int depth, bool flux_pi);

}  // namespace hexmpo
