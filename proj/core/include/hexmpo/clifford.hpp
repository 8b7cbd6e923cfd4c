#pragma once

#include <vector>

#include "hexmpo/circuit.hpp"
#include "hexmpo/lattice.hpp"
#include "hexmpo/pauli.hpp"

namespace hexmpo {

/// Conjugation direction for string evolution: Schroedinger builds the
/// circuit stabilizer U P U^dag (the paper's high-weight operators);
/// Heisenberg tracks U^dag P U (the operator the MPO engine evolves).
enum class StringDirection { Schroedinger, Heisenberg };

/// One exact round of Clifford conjugation. Both angles must sit on the
/// pi/2 grid, otherwise throws std::invalid_argument.
PauliString conjugate_by_round(const PauliString& p, const CircuitSpec& spec,
                               StringDirection dir = StringDirection::Schroedinger);

/// Depth-D stabilizer U(pi/2)^D Z_site [U^dag(pi/2)]^D at theta_J = -pi/2.
PauliString stabilizer(const Lattice& lat, int site, int depth);

/// Per-round support sizes of the conjugated string, length depth+1
/// (entry 0 is the seed weight 1).
std::vector<int> support_growth(const Lattice& lat, int site, int depth,
                                const CircuitSpec& spec,
                                StringDirection dir = StringDirection::Schroedinger);

SOperator s_operator(const Lattice& lat, int site);

/// Dense check of the companion commutation identity
///   (R_ZZ)^n e^{-i theta X_a/2} = e^{-i theta (X_a S_a^n)/2} (R_ZZ)^n
/// on lattices of at most 12 sites; returns the max-norm deviation of the
/// two operators (streamed column by column).
double verify_commutation(const Lattice& lat, int site, double theta_h, int n);

}  // namespace hexmpo
