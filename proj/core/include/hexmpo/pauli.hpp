#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace hexmpo {

enum class PauliLetter : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char letter_char(PauliLetter p);

/// Signed Pauli word: phase i^k (k in Z_4) times a tensor product of
/// single-site Paulis. Phase arithmetic is exact group arithmetic.
struct PauliString {
  uint8_t phase_exp = 0;  // phase = i^phase_exp
  std::vector<PauliLetter> letters;

  static PauliString identity(int n);
  static PauliString single(int n, int site, PauliLetter p);

  int size() const { return int(letters.size()); }
  int weight() const;
  std::array<int, 4> letter_counts() const;  // indexed by PauliLetter
  std::vector<int> support() const;
  bool is_hermitian() const { return phase_exp % 2 == 0; }
  std::complex<double> phase() const;

  PauliString dagger() const;
  bool commutes_with(const PauliString& other) const;

  /// <up^N| P |up^N>: the phase when all letters are I or Z, else 0.
  double expect_up() const;

  /// Compact text form, e.g. "+1 X3 Y17 Z42".
  std::string str() const;

  bool operator==(const PauliString&) const = default;
};

/// Exact product with phase tracking.
PauliString operator*(const PauliString& a, const PauliString& b);

/// S_a = prod_{b in NN(a)} i Z_a Z_b, the string by which R_ZZ conjugation
/// dresses X_a. Satisfies S_a^2 = (-1)^{|NN(a)|} and S_a^4 = 1.
struct SOperator {
  int site = -1;
  std::vector<int> neighbors;
  PauliString string;
};

PauliString parse_pauli(const std::string& text, int n);

}  // namespace hexmpo
