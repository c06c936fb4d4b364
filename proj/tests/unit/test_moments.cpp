#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../support/oracles.hpp"
#include "jointspec/analysis.hpp"
#include "jointspec/errors.hpp"
#include "jointspec/fixtures.hpp"
#include "jointspec/linalg.hpp"
#include "jointspec/moments.hpp"

using namespace jointspec;

namespace {

double max_residual(const VerificationReport& r, RelationId id) {
  double worst = -1.0;
  for (const auto& x : r.relations)
    if (x.id == id) worst = std::max(worst, x.residual);
  return worst;
}

}  // namespace

TEST_SUITE("moments") {
  TEST_CASE("square coefficient formula") {
    // Dihedral values: x' = -c, x'' = -s^2, z'' = 1 - c^2 give coefficient 1.
    const double c = std::cos(0.7), s = std::sin(0.7);
    CHECK(std::abs(square_coefficient(1.0, -c, -s * s, 1.0 - c * c) - 1.0) < 1e-15);
    CHECK(std::abs(square_coefficient(2.0, 0.0, 0.0, 4.0) - 1.0) < 1e-15);
  }

  TEST_CASE("dihedral pair: every relation at closed-form tolerance, coefficient 1") {
    for (double alpha : {std::numbers::pi / 3, std::numbers::pi / 4, 2 * std::numbers::pi / 5}) {
      VerifyOptions opts;
      opts.tolerance = 1e-8;
      const auto r = verify_pair(fixtures::dihedral_pair(alpha), opts);
      CHECK(r.hypotheses_hold);
      CHECK(r.z_hypotheses_hold);
      CHECK(r.all_pass());
      int squares = 0;
      for (const auto& x : r.relations) {
        if (x.id != RelationId::square_relation) continue;
        ++squares;
        CHECK(x.residual <= 1e-8);
        CHECK(x.variant.rfind("coefficient=1", 0) == 0);
      }
      CHECK(squares == 2);
      CHECK(max_residual(r, RelationId::same_projection_lemma) <= 1e-8);
    }
  }

  TEST_CASE("random normal instance") {
    const auto inst = fixtures::random_normal_instance(101);
    const auto r = verify_pair(inst.tuple);
    CHECK(r.all_pass());
    CHECK(max_residual(r, RelationId::first_moment) <= 1e-5);
    CHECK(max_residual(r, RelationId::second_moment) <= 1e-5);
    CHECK(max_residual(r, RelationId::orthogonality) <= 1e-7);
    CHECK(max_residual(r, RelationId::resolution) <= 1e-7);

    // Branch slopes against first-order perturbation theory.
    const auto a = analyze_pair(inst.tuple);
    for (std::size_t k = 0; k < a.per_lambda.size(); ++k) {
      const auto& la = a.per_lambda[k];
      Eigen::SelfAdjointEigenSolver<Matrix> es(a.resolution.projections[k]);
      const Matrix q = es.eigenvectors().rightCols(la.multiplicity);
      const auto slopes = oracle::perturbation_slopes(q, inst.tuple[1], la.lambda);
      for (const auto& b : la.branches) {
        double best = 1e300;
        for (Complex s : slopes) best = std::min(best, std::abs(s - b.d1));
        CHECK(best < 1e-7);
      }
    }
  }

  TEST_CASE("zero eigenvalue variants") {
    fixtures::RandomInstanceOptions o;
    o.zero_eigenvalue = true;
    const auto inst = fixtures::random_normal_instance(202, o);
    const auto r = verify_pair(inst.tuple);
    CHECK(r.all_pass());
    CHECK(max_residual(r, RelationId::first_moment_zero_case) >= 0.0);
    CHECK(max_residual(r, RelationId::first_moment_zero_case) <= 1e-5);
    CHECK(max_residual(r, RelationId::second_moment_zero_case) <= 1e-5);
    CHECK(max_residual(r, RelationId::prime_relation_2) <= 1e-5);
  }

  TEST_CASE("rescaling A_1 leaves the residuals unchanged") {
    const auto inst = fixtures::random_normal_instance(303);
    const MatrixTuple scaled({inst.tuple[0] / 2.0, inst.tuple[1]});
    const auto a = verify_pair(inst.tuple);
    const auto b = verify_pair(scaled);
    REQUIRE(a.relations.size() == b.relations.size());
    for (std::size_t k = 0; k < a.relations.size(); ++k) {
      CHECK(a.relations[k].id == b.relations[k].id);
      CHECK(std::abs(a.relations[k].residual - b.relations[k].residual) <= 1e-8);
    }
  }

  TEST_CASE("the first moment determines the slope") {
    const auto inst = fixtures::random_normal_instance(404);
    const auto a = analyze_pair(inst.tuple);
    for (const auto& la : a.per_lambda) {
      for (std::size_t j = 0; j < la.branches.size(); ++j) {
        const Matrix& p = la.limits[j].matrix;
        // Least-squares scalar c in ||P A_2 P - c P||_F.
        const Matrix m = p * inst.tuple[1] * p;
        const Complex c = (p.adjoint() * m).trace() / (p.adjoint() * p).trace();
        CHECK(std::abs(c + la.lambda * la.branches[j].d1) < 1e-6);
      }
    }
  }

  TEST_CASE("hypothesis handling") {
    // Commuting A_1 = diag(1, 1, 2), A_2 = diag(1, 1, 0.5): the line
    // x_1 + x_2 = 1 counted twice.
    Vector d(3), e(3);
    d << 1.0, 1.0, 2.0;
    e << 1.0, 1.0, 0.5;
    const Matrix a2 = e.asDiagonal();
    const MatrixTuple t({Matrix(d.asDiagonal()), a2});
    CHECK_THROWS_AS(verify_pair(t), HypothesisError);

    VerifyOptions opts;
    opts.run_anyway = true;
    const auto r = verify_pair(t, opts);
    CHECK_FALSE(r.hypotheses_hold);
    CHECK_FALSE(r.notes.empty());
    for (const auto& x : r.relations)
      if (x.id == RelationId::first_moment || x.id == RelationId::second_moment) CHECK_FALSE(x.claimed);

    const auto br = local_branches(t, 1.0, [] {
      Direction x(1);
      x(0) = 1.0;
      return x;
    }());
    REQUIRE(br.size() == 1);
    CHECK(br[0].multiplicity == 2);
    const auto lp = limit_projection(t, br[0]);
    CHECK_THROWS_AS(verify_first_moment(lp, a2, br[0], 1e-5), HypothesisError);
    CHECK_THROWS_AS(verify_cross_moment_zero(lp, lp, a2, 1e-5), std::invalid_argument);
  }

  TEST_CASE("refusals for non-normal A_1") {
    CHECK_THROWS_AS(verify_pair(fixtures::nonnormal_counterexample()), BlowUpError);
    CHECK_THROWS_AS(verify_pair(fixtures::puiseux_pair()), NotNormalError);
  }

  TEST_CASE("pairing by derivative") {
    Branch x;
    x.lambda = 2.0;
    x.d1 = 0.25;
    Branch z1 = x, z2 = x;
    z1.index = 0;
    z1.d1 = 0.5;
    z2.index = 1;
    z2.d1 = -3.0;
    CHECK(pair_by_derivative({x}, {z2, z1}) == std::vector<int>{0});
    CHECK_THROWS_AS(pair_by_derivative({x}, {z2}), HypothesisError);
    CHECK_THROWS_AS(pair_by_derivative({x}, {z1, z1}), HypothesisError);
  }
}
