#include <doctest.h>

#include <random>

#include "hexmpo/pauli.hpp"
#include "oracle_utils.hpp"

using namespace hexmpo;

namespace {

Mat sigma(PauliLetter p) {
  switch (p) {
    case PauliLetter::I: return (Mat(2, 2) << 1, 0, 0, 1).finished();
    case PauliLetter::X: return (Mat(2, 2) << 0, 1, 1, 0).finished();
    case PauliLetter::Y:
      return (Mat(2, 2) << 0, cx(0, -1), cx(0, 1), 0).finished();
    default: return (Mat(2, 2) << 1, 0, 0, -1).finished();
  }
}

Mat dense(const PauliString& p) {
  Mat m = Mat::Ones(1, 1);
  for (auto l : p.letters) m = oracle::kron(m, sigma(l));
  return p.phase() * m;
}

PauliString random_string(int n, std::mt19937_64& rng) {
  PauliString p = PauliString::identity(n);
  std::uniform_int_distribution<int> d4(0, 3);
  p.phase_exp = uint8_t(d4(rng));
  for (auto& l : p.letters) l = PauliLetter(d4(rng));
  return p;
}

}  // namespace

TEST_CASE("single-site multiplication matches dense algebra exhaustively") {
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      auto pa = PauliString::single(1, 0, PauliLetter(a));
      auto pb = PauliString::single(1, 0, PauliLetter(b));
      Mat lhs = dense(pa * pb);
      Mat rhs = dense(pa) * dense(pb);
      CHECK((lhs - rhs).norm() == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("XY = iZ and cyclic permutations") {
  auto X = PauliString::single(1, 0, PauliLetter::X);
  auto Y = PauliString::single(1, 0, PauliLetter::Y);
  auto Z = PauliString::single(1, 0, PauliLetter::Z);
  auto iZ = Z;
  iZ.phase_exp = 1;
  CHECK(X * Y == iZ);
  auto iX = X;
  iX.phase_exp = 1;
  CHECK(Y * Z == iX);
  auto iY = Y;
  iY.phase_exp = 1;
  CHECK(Z * X == iY);
}

TEST_CASE("multiplication is associative and matches dense on random strings") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 1 + int(rng() % 5);
    auto a = random_string(n, rng), b = random_string(n, rng),
         c = random_string(n, rng);
    CHECK(((a * b) * c) == (a * (b * c)));
    CHECK((dense(a * b) - dense(a) * dense(b)).norm() < 1e-12);
  }
}

TEST_CASE("weight, counts, support") {
  auto p = parse_pauli("+i X0 Y2 Z3", 5);
  CHECK(p.weight() == 3);
  auto c = p.letter_counts();
  CHECK(c[int(PauliLetter::X)] == 1);
  CHECK(c[int(PauliLetter::Y)] == 1);
  CHECK(c[int(PauliLetter::Z)] == 1);
  CHECK(c[int(PauliLetter::I)] == 2);
  CHECK(p.support() == std::vector<int>{0, 2, 3});
  CHECK_FALSE(p.is_hermitian());
  CHECK(p.dagger().phase_exp == 3);
}

TEST_CASE("expect_up closed form vs dense") {
  std::mt19937_64 rng(23);
  Vec up4 = Vec::Zero(16);
  up4[0] = 1.0;
  for (int trial = 0; trial < 40; ++trial) {
    auto p = random_string(4, rng);
    p.phase_exp &= 2;  // keep hermitian: phase +1 or -1
    Vec up = Vec::Zero(16);
    up[0] = 1.0;
    double expected = (up.adjoint() * dense(p) * up)(0, 0).real();
    CHECK(p.expect_up() == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("string text form round trip") {
  auto p = parse_pauli("-1 X3 Y17 Z42", 64);
  CHECK(p.str() == "-1 X3 Y17 Z42");
  CHECK(parse_pauli(p.str(), 64) == p);
  auto id = PauliString::identity(3);
  CHECK(id.str() == "+1 I");
}

TEST_CASE("commutation check") {
  auto zz = parse_pauli("+1 Z0 Z1", 3);
  auto x0 = parse_pauli("+1 X0", 3);
  auto xx = parse_pauli("+1 X0 X1", 3);
  CHECK_FALSE(zz.commutes_with(x0));
  CHECK(zz.commutes_with(xx));
}
