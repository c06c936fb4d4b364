#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "../support/oracles.hpp"
#include "jointspec/branches.hpp"
#include "jointspec/errors.hpp"
#include "jointspec/fixtures.hpp"
#include "jointspec/linalg.hpp"

using namespace jointspec;

namespace {

Direction unit() {
  Direction d(1);
  d(0) = 1.0;
  return d;
}

Matrix normal_2x2(Complex a, Complex b, std::mt19937_64& rng) {
  Vector d(2);
  d << a, b;
  const Matrix u = linalg::random_unitary(2, rng);
  return u * d.asDiagonal() * u.adjoint();
}

Matrix gaussian(int n, std::mt19937_64& rng) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = linalg::complex_normal(rng);
  return m;
}

}  // namespace

TEST_SUITE("branches") {
  TEST_CASE("spectral resolution of a normal matrix") {
    std::mt19937_64 rng(1);
    Vector d(4);
    d << 1.0, 1.0, Complex(0, 2), -3.0;
    const Matrix u = linalg::random_unitary(4, rng);
    const Matrix a = u * d.asDiagonal() * u.adjoint();
    const auto res = spectral_resolution(a);
    REQUIRE(res.eigenvalues.size() == 3);
    Matrix sum = Matrix::Zero(4, 4), recon = Matrix::Zero(4, 4);
    for (std::size_t k = 0; k < 3; ++k) {
      sum += res.projections[k];
      recon += res.eigenvalues[k] * res.projections[k];
      for (std::size_t l = 0; l < 3; ++l)
        if (l != k) CHECK(oracle::opnorm(res.projections[k] * res.projections[l]) < 1e-12);
    }
    CHECK(oracle::opnorm(sum - Matrix::Identity(4, 4)) < 1e-12);
    CHECK(oracle::opnorm(recon - a) < 1e-12);
    CHECK(res.multiplicities[res.index_of(1.0)] == 2);
    CHECK_THROWS_AS(res.index_of(7.0), UnknownEigenvalue);
    CHECK_THROWS_AS(spectral_resolution(fixtures::nonnormal_counterexample()[0]), NotNormalError);
  }

  TEST_CASE("reduced resolvent inverts A_1 - lambda off the eigenspace") {
    std::mt19937_64 rng(2);
    Vector d(3);
    d << 1.0, 2.0, Complex(0, 1);
    const Matrix u = linalg::random_unitary(3, rng);
    const Matrix a = u * d.asDiagonal() * u.adjoint();
    const auto res = spectral_resolution(a);
    const auto t = t_operator(res, 1.0);
    const Matrix p = res.projections[res.index_of(1.0)];
    CHECK(oracle::opnorm(t.matrix * (Matrix::Identity(3, 3) - a) - (Matrix::Identity(3, 3) - p)) < 1e-12);
  }

  TEST_CASE("ladder") {
    const auto l = geometric_ladder(0.1, 4);
    REQUIRE(l.size() == 4);
    CHECK(l[0] == 0.1);
    CHECK(l[3] == doctest::Approx(0.0125));
    CHECK_THROWS_AS(geometric_ladder(0.0, 4), std::invalid_argument);
  }

  TEST_CASE("two lines through (1,0)") {
    const auto br = local_branches(fixtures::diagonal_lines(), 1.0, unit());
    REQUIRE(br.size() == 2);
    std::vector<double> slopes{br[0].d1.real(), br[1].d1.real()};
    std::sort(slopes.begin(), slopes.end());
    CHECK(slopes[0] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(slopes[1] == doctest::Approx(1.0).epsilon(1e-10));
    for (const auto& b : br) {
      CHECK(std::abs(b.d2) < 1e-8);
      CHECK(b.multiplicity == 1);
    }
  }

  TEST_CASE("derivatives agree with implicit differentiation on random 2x2 normal pairs") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 6; ++trial) {
      const Complex l1 = std::polar(1.0 + 0.2 * trial, 0.7 * trial), l2 = -l1 + Complex(0.3, 0.8);
      const Matrix a1 = normal_2x2(l1, l2, rng);
      const Matrix a2 = gaussian(2, rng) * 0.5;
      const MatrixTuple pair({a1, a2});
      for (Complex lam : {l1, l2}) {
        const auto br = local_branches(pair, lam, unit());
        REQUIRE(br.size() == 1);
        const auto ref = oracle::implicit_derivatives_2x2(a1, a2, 1.0 / lam);
        CHECK(std::abs(br[0].d1 - ref.d1) < 1e-7 * (1.0 + std::abs(ref.d1)));
        CHECK(std::abs(br[0].d2 - ref.d2) < 1e-7 * (1.0 + std::abs(ref.d2)));
        // Sample values against the quadratic formula.
        for (const auto& s : br[0].samples) {
          const auto roots = oracle::quadratic_roots_2x2(a1, a2, s.t);
          double best = 1e300;
          for (Complex r : roots) best = std::min(best, std::abs(r - s.value));
          CHECK(best < 1e-10);
        }
      }
    }
  }

  TEST_CASE("zero eigenvalue branches follow the eigenvalues of A_1 + t B") {
    std::mt19937_64 rng(11);
    Matrix a1 = Matrix::Zero(2, 2);
    a1(1, 1) = 1.0;
    const Matrix b = gaussian(2, rng) * 0.5;
    CHECK(branch_kind(a1, 0.0) == BranchKind::zero_lambda);
    CHECK(branch_kind(a1, 1.0) == BranchKind::nonzero_lambda);
    const auto br = local_branches(MatrixTuple({a1, b}), 0.0, unit());
    REQUIRE(br.size() == 1);
    CHECK(br[0].kind == BranchKind::zero_lambda);
    // Second-order perturbation of the eigenvalue 0 of diag(0, 1).
    const Complex d1 = b(0, 0), d2 = 2.0 * b(0, 1) * b(1, 0) / (0.0 - 1.0);
    CHECK(std::abs(br[0].d1 - d1) < 1e-7);
    CHECK(std::abs(br[0].d2 - d2) < 1e-7);
  }

  TEST_CASE("regularity conditions") {
    SUBCASE("transversal lines") {
      const auto r = check_regularity(fixtures::diagonal_lines(), 1.0, unit());
      CHECK(r.condition_a);
      CHECK(r.condition_b);
      CHECK(r.branch_count == 2);
      CHECK(r.tangency_margin == doctest::Approx(2.0).epsilon(1e-8));
    }
    SUBCASE("square-root branches fail a)") {
      const auto r = check_regularity(fixtures::puiseux_pair(), 1.0, unit());
      CHECK_FALSE(r.condition_a);
    }
    SUBCASE("a doubled component fails b) but not a)") {
      const MatrixTuple t({Matrix::Identity(2, 2), Matrix::Identity(2, 2)});
      const auto r = check_regularity(t, 1.0, unit());
      CHECK(r.condition_a);
      CHECK_FALSE(r.condition_b);
      CHECK(r.total_multiplicity == 2);
    }
    SUBCASE("equal slopes of distinct components fail b)") {
      // Two components with slope -1 that separate only at second order.
      Matrix a1 = Matrix::Identity(3, 3);
      a1(2, 2) = 3.0;
      Matrix a2 = Matrix::Zero(3, 3);
      a2(0, 0) = a2(1, 1) = 1.0;
      a2(0, 2) = a2(2, 0) = 0.5;
      a2(1, 2) = 0.5;
      a2(2, 1) = 0.5;
      const auto r = check_regularity(MatrixTuple({a1, a2}), 1.0, unit());
      CHECK_FALSE(r.condition_b);
    }
  }

  TEST_CASE("branch candidates are ordered by distance") {
    const auto c = branch_candidates(fixtures::diagonal_lines(), 1.0, unit(), 0.1, 0.92);
    REQUIRE(c.size() == 2);
    CHECK(std::abs(c[0] - 0.9) < 1e-12);
    CHECK(std::abs(c[1] - 1.1) < 1e-12);
  }
}
