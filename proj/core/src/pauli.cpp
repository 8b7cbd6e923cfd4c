#include "hexmpo/pauli.hpp"

#include <array>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace hexmpo {

namespace {

// phase exponent of sigma_a * sigma_b = i^k sigma_{a xor b}
constexpr uint8_t kPhase[4][4] = {
    {0, 0, 0, 0},
    {0, 0, 1, 3},  // X*X=I, X*Y=iZ, X*Z=-iY
    {0, 3, 0, 1},  // Y*X=-iZ, Y*Z=iX
    {0, 1, 3, 0},  // Z*X=iY, Z*Y=-iX
};

}  // namespace

char letter_char(PauliLetter p) { return "IXYZ"[int(p)]; }

PauliString PauliString::identity(int n) {
  PauliString s;
  s.letters.assign(n, PauliLetter::I);
  return s;
}

PauliString PauliString::single(int n, int site, PauliLetter p) {
  auto s = identity(n);
  s.letters.at(site) = p;
  return s;
}

int PauliString::weight() const {
  int w = 0;
  for (auto l : letters) w += (l != PauliLetter::I);
  return w;
}

std::array<int, 4> PauliString::letter_counts() const {
  std::array<int, 4> c{0, 0, 0, 0};
  for (auto l : letters) ++c[int(l)];
  return c;
}

std::vector<int> PauliString::support() const {
  std::vector<int> s;
  for (int i = 0; i < size(); ++i)
    if (letters[i] != PauliLetter::I) s.push_back(i);
  return s;
}

std::complex<double> PauliString::phase() const {
  static const std::complex<double> tab[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return tab[phase_exp % 4];
}

PauliString PauliString::dagger() const {
  PauliString s = *this;
  s.phase_exp = uint8_t((4 - phase_exp % 4) % 4);
  return s;
}

bool PauliString::commutes_with(const PauliString& other) const {
  if (size() != other.size())
    throw std::invalid_argument("pauli: length mismatch");
  int anti = 0;
  for (int i = 0; i < size(); ++i) {
    auto a = letters[i], b = other.letters[i];
    if (a != PauliLetter::I && b != PauliLetter::I && a != b) ++anti;
  }
  return anti % 2 == 0;
}

double PauliString::expect_up() const {
  for (auto l : letters)
    if (l == PauliLetter::X || l == PauliLetter::Y) return 0.0;
  switch (phase_exp % 4) {
    case 0: return 1.0;
    case 2: return -1.0;
    default:
      throw std::logic_error("expect_up: non-hermitian diagonal string");
  }
}

std::string PauliString::str() const {
  static const char* ph[4] = {"+1", "+i", "-1", "-i"};
  std::string out = ph[phase_exp % 4];
  bool any = false;
  for (int i = 0; i < size(); ++i)
    if (letters[i] != PauliLetter::I) {
      out += fmt::format(" {}{}", letter_char(letters[i]), i);
      any = true;
    }
  if (!any) out += " I";
  return out;
}

PauliString operator*(const PauliString& a, const PauliString& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("pauli: length mismatch");
  PauliString r;
  r.phase_exp = uint8_t((a.phase_exp + b.phase_exp) % 4);
  r.letters.resize(a.size());
  for (int i = 0; i < a.size(); ++i) {
    int x = int(a.letters[i]), y = int(b.letters[i]);
    r.phase_exp = uint8_t((r.phase_exp + kPhase[x][y]) % 4);
    r.letters[i] = PauliLetter(x ^ y);
  }
  return r;
}

PauliString parse_pauli(const std::string& text, int n) {
  PauliString s = PauliString::identity(n);
  std::istringstream in(text);
  std::string tok;
  bool first = true;
  while (in >> tok) {
    if (first && (tok == "+1" || tok == "+i" || tok == "-1" || tok == "-i")) {
      s.phase_exp = tok == "+1" ? 0 : tok == "+i" ? 1 : tok == "-1" ? 2 : 3;
      first = false;
      continue;
    }
    first = false;
    if (tok == "I") continue;
    PauliLetter p;
    switch (tok[0]) {
      case 'X': p = PauliLetter::X; break;
      case 'Y': p = PauliLetter::Y; break;
      case 'Z': p = PauliLetter::Z; break;
      default: throw std::invalid_argument(fmt::format("bad pauli token '{}'", tok));
    }
    int site = std::stoi(tok.substr(1));
    if (site < 0 || site >= n)
      throw std::invalid_argument(fmt::format("pauli site {} out of range", site));
    s.letters[site] = p;
  }
  return s;
}

}  // namespace hexmpo
