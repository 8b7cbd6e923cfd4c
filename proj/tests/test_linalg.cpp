#include <doctest.h>

#include <random>

#include "hexmpo/linalg.hpp"

using namespace hexmpo;

namespace {

Mat random_mat(int m, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Mat a(m, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) a(i, j) = cx(g(rng), g(rng));
  return a;
}

}  // namespace

TEST_CASE("svd reconstructs and matches Eigen") {
  auto a = random_mat(37, 21, 5);
  auto dec = svd(a);
  CHECK((dec.u * dec.s.asDiagonal() * dec.vh - a).norm() < 1e-11);
  Eigen::JacobiSVD<Mat> ref(a);
  CHECK((dec.s - ref.singularValues()).norm() < 1e-10);
  CHECK((dec.u.adjoint() * dec.u - Mat::Identity(21, 21)).norm() < 1e-12);
}

TEST_CASE("qr_thin gives exact isometry") {
  auto a = random_mat(64, 17, 7);
  Mat q, r;
  qr_thin(a, q, r);
  CHECK((q.adjoint() * q - Mat::Identity(17, 17)).norm() < 1e-12);
  CHECK((q * r - a).norm() < 1e-11);
}

TEST_CASE("truncated_split equals optimal rank-k truncation") {
  auto a = random_mat(40, 30, 9);
  SplitOptions opt;
  opt.chi_max = 7;
  auto ts = truncated_split(a, opt);
  CHECK(ts.left.cols() == 7);
  CHECK((ts.left.adjoint() * ts.left - Mat::Identity(7, 7)).norm() < 1e-12);
  Eigen::JacobiSVD<Mat> ref(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double best_err2 = 0;
  for (int i = 7; i < ref.singularValues().size(); ++i)
    best_err2 += ref.singularValues()[i] * ref.singularValues()[i];
  CHECK((a - ts.left * ts.right).squaredNorm() ==
        doctest::Approx(best_err2).epsilon(1e-10));
  CHECK(ts.discarded_sq == doctest::Approx(best_err2).epsilon(1e-10));
  CHECK(ts.total_sq == doctest::Approx(a.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("gram route agrees with svd route on large blocks") {
  auto a = random_mat(640, 520, 13);  // min dim above the gram threshold
  SplitOptions opt;
  opt.chi_max = 100;
  auto ts = truncated_split(a, opt);
  CHECK((ts.left.adjoint() * ts.left - Mat::Identity(100, 100)).norm() < 1e-11);
  Eigen::BDCSVD<Mat> ref(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double best_err2 = 0;
  for (int i = 100; i < ref.singularValues().size(); ++i)
    best_err2 += ref.singularValues()[i] * ref.singularValues()[i];
  CHECK((a - ts.left * ts.right).squaredNorm() ==
        doctest::Approx(best_err2).epsilon(1e-8));
  for (int i = 0; i < 100; ++i)
    CHECK(ts.kept[i] == doctest::Approx(ref.singularValues()[i]).epsilon(1e-9));
  // wide orientation
  Mat aw = a.adjoint();
  auto tsw = truncated_split(aw, opt);
  CHECK((aw - tsw.left * tsw.right).squaredNorm() ==
        doctest::Approx(best_err2).epsilon(1e-8));
}

TEST_CASE("split_product fast path: exact QR split when inner dim fits") {
  auto x = random_mat(50, 12, 17);
  auto y = random_mat(12, 33, 19);
  SplitOptions opt;
  opt.chi_max = 16;
  auto ts = truncated_split_product(x, y, opt);
  CHECK(ts.left.cols() == 12);
  CHECK((ts.left.adjoint() * ts.left - Mat::Identity(12, 12)).norm() < 1e-12);
  CHECK((ts.left * ts.right - x * y).norm() < 1e-11);
  CHECK(ts.discarded_sq == 0.0);
  CHECK(ts.total_sq == doctest::Approx((x * y).squaredNorm()).epsilon(1e-10));
}

TEST_CASE("split_product factored route matches direct split") {
  auto x = random_mat(90, 14, 21);
  auto y = random_mat(14, 80, 22);
  SplitOptions opt;
  opt.chi_max = 6;
  auto f = truncated_split_product(x, y, opt, true);
  auto d = truncated_split(Mat(x * y), opt);
  CHECK((f.left * f.right - d.left * d.right).norm() < 1e-10);
  CHECK(f.discarded_sq == doctest::Approx(d.discarded_sq).epsilon(1e-8));
}

TEST_CASE("singular value floor drops null channels") {
  Mat a = Mat::Zero(10, 8);
  a(0, 0) = 2.0;
  a(1, 1) = 1.0;
  a(2, 2) = 1e-16;  // below floor
  SplitOptions opt;
  opt.chi_max = 8;
  auto ts = truncated_split(a, opt);
  CHECK(ts.left.cols() == 2);
}

TEST_CASE("degenerate multiplet split is flagged") {
  Mat a = Mat::Zero(6, 6);
  for (int i = 0; i < 4; ++i) a(i, i) = 1.0;  // exactly flat rank 4
  SplitOptions opt;
  opt.chi_max = 2;
  auto ts = truncated_split(a, opt);
  CHECK(ts.split_degenerate);
  opt.chi_max = 4;
  auto ok = truncated_split(a, opt);
  CHECK_FALSE(ok.split_degenerate);
}
