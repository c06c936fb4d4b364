#include <doctest.h>

#include <algorithm>
#include <random>

#include "jointspec/errors.hpp"
#include "jointspec/fixtures.hpp"
#include "jointspec/linalg.hpp"
#include "jointspec/pencil.hpp"

using namespace jointspec;

namespace {

Matrix random_matrix(int n, std::mt19937_64& rng) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = linalg::complex_normal(rng);
  return m;
}

PencilPoint point(Complex a, Complex b) {
  PencilPoint x(2);
  x << a, b;
  return x;
}

}  // namespace

TEST_SUITE("pencil") {
  TEST_CASE("tuple validation") {
    CHECK_THROWS_AS(MatrixTuple({}), DimensionMismatch);
    CHECK_THROWS_AS(MatrixTuple({Matrix::Identity(2, 2), Matrix::Identity(3, 3)}), DimensionMismatch);
    CHECK_THROWS_AS(MatrixTuple({Matrix::Zero(2, 3)}), DimensionMismatch);
    const auto t = MatrixTuple::from_real({Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 2)});
    CHECK(t.size() == 2);
    CHECK(t.dim() == 2);
  }

  TEST_CASE("projective determinant at x_{n+1} = 1 equals the proper one") {
    std::mt19937_64 rng(3);
    const MatrixTuple t({random_matrix(4, rng), random_matrix(4, rng), random_matrix(4, rng)});
    for (int k = 0; k < 5; ++k) {
      PencilPoint x(3);
      for (int j = 0; j < 3; ++j) x(j) = linalg::complex_normal(rng);
      const Complex a = det_proper(t, x), b = det_projective(t, x, 1.0);
      CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
      // Direct evaluation.
      const Matrix m = x(0) * t[0] + x(1) * t[1] + x(2) * t[2] - Matrix::Identity(4, 4);
      CHECK(std::abs(m.determinant() - a) <= 1e-10 * (1.0 + std::abs(a)));
    }
  }

  TEST_CASE("membership is judged by the relative smallest singular value") {
    const auto t = fixtures::diagonal_lines();
    CHECK(is_spectral_point(t, point(0.3, 0.7), 1e-12));
    CHECK(is_spectral_point(t, point(Complex(1, 2), Complex(0, -2)), 1e-12));
    CHECK_FALSE(is_spectral_point(t, point(0.3, 0.3), 1e-8));
    CHECK_THROWS_AS(is_spectral_point(t, point(0.3, 0.7), 0.0), std::invalid_argument);
  }

  TEST_CASE("slice roots at scale 0 are the reciprocals of the nonzero eigenvalues") {
    std::mt19937_64 rng(5);
    Vector d(5);
    d << 2.0, Complex(0, 1), 0.0, 2.0, -0.5;
    const Matrix u = linalg::random_unitary(5, rng);
    const MatrixTuple t({u * d.asDiagonal() * u.adjoint(), random_matrix(5, rng)});
    Direction xhat(1);
    xhat(0) = 1.0;
    const auto roots = slice_roots(t, xhat, 0.0);
    CHECK(roots.infinite == 1);
    REQUIRE(roots.finite.size() == 4);
    std::vector<Complex> expected;
    for (Complex mu : linalg::eigenvalues(t[0]))
      if (std::abs(mu) > 1e-8) expected.push_back(1.0 / mu);
    REQUIRE(expected.size() == 4);
    // Match with multiplicity.
    std::vector<bool> used(expected.size(), false);
    for (Complex r : roots.finite) {
      bool found = false;
      for (std::size_t k = 0; k < expected.size() && !found; ++k) {
        if (!used[k] && std::abs(expected[k] - r) < 1e-8) used[k] = found = true;
      }
      CHECK(found);
    }
  }

  TEST_CASE("lead roots lie on the spectrum") {
    std::mt19937_64 rng(9);
    const MatrixTuple t({random_matrix(3, rng), random_matrix(3, rng), random_matrix(3, rng)});
    PencilPoint off(3);
    off << 0.0, Complex(0.3, -0.1), Complex(-0.2, 0.4);
    const auto roots = lead_roots(t, 0, off);
    CHECK(roots.finite.size() == 3);
    for (Complex r : roots.finite) {
      PencilPoint x = off;
      x(0) = r;
      CHECK(spectral_distance(t, x) < 1e-12);
    }
  }

  TEST_CASE("normality") {
    CHECK(normality(fixtures::diagonal_lines()[1]).is_normal);
    const auto n = normality(fixtures::nonnormal_counterexample()[0]);
    CHECK_FALSE(n.is_normal);
    CHECK_FALSE(n.is_diagonalizable);
    CHECK(n.commutator_norm == doctest::Approx(1.0));
  }

  TEST_CASE("grid sampling") {
    GridSpec g;
    g.n1 = g.n2 = 24;
    const auto lines = sample_spectrum_curve(fixtures::diagonal_lines(), g);
    CHECK(lines.size() > 10);
    for (const auto& x : lines) {
      CHECK(is_spectral_point(fixtures::diagonal_lines(), x, 1e-8));
      const double on_line = std::min(std::abs(x(0) + x(1) - 1.0), std::abs(x(0) - x(1) - 1.0));
      CHECK(on_line < 1e-9);
    }
    CHECK(std::is_sorted(lines.begin(), lines.end(), [](const PencilPoint& a, const PencilPoint& b) {
      return std::make_tuple(a(0).real(), a(0).imag(), a(1).real(), a(1).imag()) <
             std::make_tuple(b(0).real(), b(0).imag(), b(1).real(), b(1).imag());
    }));
    CHECK(sample_spectrum_curve(fixtures::zero_tuple(), g).empty());
  }
}
