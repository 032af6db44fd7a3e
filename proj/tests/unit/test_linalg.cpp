#include <cmath>
#include <random>

#include "doctest.h"
#include "trihalo/linalg.hpp"

using namespace trihalo;

namespace {

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DenseMatrix a(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) a(r, c) = dist(rng);
  return a;
}

// 3x3 solve by Cramer's rule, independent of the QR code.
std::array<double, 3> cramer(const DenseMatrix& m, const std::vector<double>& b) {
  auto det = [](double a, double b_, double c, double d, double e, double f, double g, double h,
                double i) { return a * (e * i - f * h) - b_ * (d * i - f * g) + c * (d * h - e * g); };
  const double d = det(m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), m(2, 0), m(2, 1), m(2, 2));
  std::array<double, 3> x{};
  for (int col = 0; col < 3; ++col) {
    DenseMatrix t = m;
    for (int r = 0; r < 3; ++r) t(r, col) = b[r];
    x[col] = det(t(0, 0), t(0, 1), t(0, 2), t(1, 0), t(1, 1), t(1, 2), t(2, 0), t(2, 1), t(2, 2)) / d;
  }
  return x;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("identity system") {
  const std::vector<double> b{1.0, -2.0, 3.5};
  const LeastSquaresSolution s = qr_least_squares(DenseMatrix::identity(3), b);
  for (int i = 0; i < 3; ++i) CHECK(s.coefficients[i] == doctest::Approx(b[i]).epsilon(1e-15));
  CHECK(s.condition_estimate == doctest::Approx(1.0));
}

TEST_CASE("a single column of ones fits the mean") {
  const DenseMatrix a(5, 1, 1.0);
  const std::vector<double> b{1, 2, 3, 4, 10};
  CHECK(qr_least_squares(a, b).coefficients[0] == doctest::Approx(4.0));
}

TEST_CASE("agrees with the normal equations") {
  const DenseMatrix a = random_matrix(8, 3, 5);
  const std::vector<double> b{0.3, -1, 2, 0.5, 0.1, -0.7, 1.2, 0.0};
  const DenseMatrix at = a.transposed();
  const std::array<double, 3> expected = cramer(at * a, at.multiply(b));
  const LeastSquaresSolution s = qr_least_squares(a, b);
  for (int i = 0; i < 3; ++i) CHECK(s.coefficients[i] == doctest::Approx(expected[i]).epsilon(1e-12));

  // Residual is orthogonal to the column space.
  std::vector<double> residual = a.multiply(s.coefficients);
  for (std::size_t r = 0; r < residual.size(); ++r) residual[r] -= b[r];
  for (double v : at.multiply(residual)) CHECK(std::abs(v) < 1e-13);
  CHECK(s.condition_estimate >= 1.0);
}

TEST_CASE("pseudo-inverse is a left inverse") {
  const DenseMatrix a = random_matrix(10, 4, 9);
  const DenseMatrix pinv = solve_pseudoinverse_rows(a);
  REQUIRE(pinv.rows() == 4);
  REQUIRE(pinv.cols() == 10);
  const DenseMatrix product = pinv * a;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) CHECK(product(r, c) == doctest::Approx(r == c ? 1.0 : 0.0).epsilon(1e-13).scale(1));
}

TEST_CASE("three-point quadratic fit gives the classic difference weights") {
  // Columns 1, x, x^2/2 at x = -1, 0, 1.
  const DenseMatrix a = DenseMatrix::from_rows({{1, -1, 0.5}, {1, 0, 0}, {1, 1, 0.5}});
  const DenseMatrix w = solve_pseudoinverse_rows(a);
  const double expected[3][3] = {{0, 1, 0}, {-0.5, 0, 0.5}, {1, -2, 1}};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(w(r, c) == doctest::Approx(expected[r][c]).scale(1).epsilon(1e-14));
}

TEST_CASE("rank deficiency is reported") {
  const DenseMatrix a = DenseMatrix::from_rows({{1, 2}, {2, 4}, {3, 6}});
  CHECK_THROWS_AS(HouseholderQr{a}, SingularFitError);
  try {
    HouseholderQr qr(a);
  } catch (const SingularFitError& e) {
    CHECK(e.column() == 1);
  }
  CHECK_THROWS_AS(HouseholderQr{DenseMatrix(2, 3)}, std::invalid_argument);
}

TEST_CASE("condition estimate tracks column scaling") {
  const DenseMatrix a = DenseMatrix::from_rows({{1, 0}, {0, 1e-3}, {0, 0}});
  CHECK(HouseholderQr(a).condition_estimate() == doctest::Approx(1e3));
}

TEST_CASE("dense helpers") {
  const DenseMatrix a = DenseMatrix::from_rows({{1, 2}, {3, 4}});
  const DenseMatrix t = a.transposed();
  CHECK(t(0, 1) == 3);
  const DenseMatrix p = a * DenseMatrix::identity(2);
  CHECK(p(1, 0) == 3);
  CHECK_THROWS_AS(DenseMatrix::from_rows({{1, 2}, {3}}), std::invalid_argument);
}

}
