#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support/oracles.hpp"
#include "jointspec/coxeter.hpp"
#include "jointspec/errors.hpp"
#include "jointspec/fixtures.hpp"
#include "jointspec/linalg.hpp"

using namespace jointspec;

namespace {

constexpr double kPi = std::numbers::pi;

Summand dihedral(IrrepKind k, double angle = 0.0) { return {SummandKind::dihedral, DihedralIrrep{k, angle}}; }

int multiplicity_of(const PairDecomposition& pd, IrrepKind kind, double angle = 0.0) {
  for (const auto& [irrep, mult] : pd.constituents)
    if (irrep.kind == kind && (kind != IrrepKind::two_dim || std::abs(irrep.angle - angle) < 1e-8)) return mult;
  return 0;
}

}  // namespace

TEST_SUITE("coxeter") {
  TEST_CASE("Coxeter matrix validation") {
    CHECK_THROWS_AS(CoxeterMatrix({{1, 3}, {2, 1}}), InconsistentAssignment);
    CHECK_THROWS_AS(CoxeterMatrix({{2, 3}, {3, 1}}), InconsistentAssignment);
    CHECK_THROWS_AS(CoxeterMatrix({{1, 1}, {1, 1}}), InconsistentAssignment);
    CHECK_THROWS_AS(CoxeterMatrix({{1, 3}}), InconsistentAssignment);
    CHECK(CoxeterMatrix::type_a(4).at(1, 2) == 3);
    CHECK(CoxeterMatrix::type_a(4).at(0, 2) == 2);
  }

  TEST_CASE("classification") {
    auto check = [](const CoxeterMatrix& cm, const std::string& name, bool finite, bool non_special) {
      const auto g = classify(cm);
      CHECK(g.name == name);
      CHECK(g.finite == finite);
      CHECK(g.non_special == non_special);
    };
    check(CoxeterMatrix::type_a(3), "A3", true, true);
    check(CoxeterMatrix::dihedral(5), "I2(5)", true, true);
    check(CoxeterMatrix::dihedral(0), "I2(inf)", false, false);
    check(CoxeterMatrix({{1, 4, 2}, {4, 1, 3}, {2, 3, 1}}), "B3", true, true);
    check(CoxeterMatrix({{1, 3, 2, 2}, {3, 1, 3, 3}, {2, 3, 1, 2}, {2, 3, 2, 1}}), "D4", true, true);
    check(CoxeterMatrix({{1, 5, 2}, {5, 1, 3}, {2, 3, 1}}), "H3", true, false);
    check(CoxeterMatrix({{1, 3, 2, 2}, {3, 1, 4, 2}, {2, 4, 1, 3}, {2, 2, 3, 1}}), "F4", true, false);
    check(CoxeterMatrix({{1, 3, 3}, {3, 1, 3}, {3, 3, 1}}), "other", false, false);
    check(CoxeterMatrix({{1, 2}, {2, 1}}), "A1 x A1", true, true);
  }

  TEST_CASE("dihedral irreps") {
    CHECK(DihedralIrrep{IrrepKind::two_dim, 2 * kPi / 5}.product_order() == 5);
    CHECK(DihedralIrrep{IrrepKind::two_dim, kPi / 3}.product_order() == 6);
    CHECK(DihedralIrrep{IrrepKind::one_dim_pm, 0}.product_order() == 2);
    CHECK(DihedralIrrep{IrrepKind::one_dim_mm, 0}.product_order() == 1);
    CHECK(DihedralIrrep{IrrepKind::two_dim, std::sqrt(2.0)}.product_order() == 0);
  }

  TEST_CASE("representations satisfy the Coxeter relations") {
    const auto rep = build_representation(
        CoxeterMatrix::dihedral(5),
        {dihedral(IrrepKind::two_dim, 2 * kPi / 5), dihedral(IrrepKind::two_dim, 4 * kPi / 5),
         dihedral(IrrepKind::one_dim_mm)},
        7);
    CHECK(rep.dim() == 5);
    for (const auto& g : rep.generators) CHECK(oracle::opnorm(g * g - Matrix::Identity(5, 5)) < 1e-10);
    Matrix p = Matrix::Identity(5, 5);
    for (int k = 0; k < 5; ++k) p = p * rep.generators[0] * rep.generators[1];
    CHECK(oracle::opnorm(p - Matrix::Identity(5, 5)) < 1e-10);

    const auto a3 = build_representation(CoxeterMatrix::type_a(3), {{SummandKind::geometric, {}}});
    CHECK(a3.dim() == 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int m = a3.cm.at(i, j);
        Matrix q = Matrix::Identity(3, 3);
        for (int k = 0; k < m; ++k) q = q * a3.generators[i] * a3.generators[j];
        CHECK(oracle::opnorm(q - Matrix::Identity(3, 3)) < 1e-10);
      }
  }

  TEST_CASE("inconsistent assignments are rejected") {
    // (g1 g2) has order 6 for angle pi/3 and order 8 for pi/4.
    CHECK_THROWS_AS(build_representation(CoxeterMatrix::dihedral(3), {dihedral(IrrepKind::two_dim, kPi / 3)}),
                    InconsistentAssignment);
    CHECK_THROWS_AS(build_representation(CoxeterMatrix::dihedral(4), {dihedral(IrrepKind::two_dim, kPi / 4)}),
                    InconsistentAssignment);
    CHECK_THROWS_AS(build_representation(CoxeterMatrix::dihedral(3), {dihedral(IrrepKind::one_dim_pm)}),
                    InconsistentAssignment);
    CHECK_THROWS_AS(build_representation(CoxeterMatrix::dihedral(3), {dihedral(IrrepKind::two_dim, 0.0)}),
                    InconsistentAssignment);
    CHECK_THROWS_AS(build_representation(CoxeterMatrix::type_a(3), {dihedral(IrrepKind::one_dim_pp)}),
                    InconsistentAssignment);
    CHECK_THROWS_AS(
        build_representation(CoxeterMatrix({{1, 3, 3}, {3, 1, 3}, {3, 3, 1}}), {{SummandKind::geometric, {}}}),
        InconsistentAssignment);
    // Infinite dihedral groups accept any angle.
    CHECK_NOTHROW(build_representation(CoxeterMatrix::dihedral(0), {dihedral(IrrepKind::two_dim, 1.0)}));
  }

  TEST_CASE("catalog descriptors match the irreducible pencils") {
    std::mt19937_64 rng(21);
    std::vector<DihedralIrrep> irreps{{IrrepKind::one_dim_pp, 0}, {IrrepKind::one_dim_mm, 0},
                                      {IrrepKind::one_dim_pm, 0}, {IrrepKind::one_dim_mp, 0}};
    for (double a : {kPi / 3, kPi / 4, kPi / 5, 2 * kPi / 5, kPi / 2}) irreps.push_back({IrrepKind::two_dim, a});
    for (const auto& irrep : irreps) {
      const auto [g1, g2] = irrep.generators();
      const MatrixTuple x({g1, g2}), z({g1, Matrix(g1 * g2)});
      const auto [dx, dz] = dihedral_component_catalog(irrep);
      for (const auto& p : dx.sample(rng, 50)) {
        CHECK(is_spectral_point(x, p, 1e-9));
        CHECK(std::abs(dx.evaluate(p(0), p(1))) < 1e-9);
      }
      for (const auto& p : dz.sample(rng, 50)) CHECK(is_spectral_point(z, p, 1e-9));
      // Conversely, spectrum points found by the pencil solver satisfy the polynomial.
      for (int k = 0; k < 10; ++k) {
        PencilPoint off(2);
        off << 0.0, linalg::complex_normal(rng);
        for (Complex r : lead_roots(x, 0, off).finite) CHECK(std::abs(dx.evaluate(r, off(1))) < 1e-9);
        for (Complex r : lead_roots(z, 0, off).finite) CHECK(std::abs(dz.evaluate(r, off(1))) < 1e-9);
      }
    }
  }

  TEST_CASE("condition (*) decompositions") {
    const auto m5 = fixtures::planted_dihedral(5).rep;
    const auto s5 = check_condition_star(m5);
    REQUIRE(s5.size() == 1);
    CHECK(s5[0].multiplicity_free);
    CHECK(multiplicity_of(s5[0], IrrepKind::two_dim, 2 * kPi / 5) == 1);
    CHECK(multiplicity_of(s5[0], IrrepKind::two_dim, 4 * kPi / 5) == 1);

    const auto a3 = fixtures::planted_a3().rep;
    const auto s3 = check_condition_star(a3);
    REQUIRE(s3.size() == 2);
    const auto& p13 = s3[1];  // generators 1 and 3 commute
    CHECK(p13.i == 2);
    CHECK(multiplicity_of(p13, IrrepKind::one_dim_pp) == 1);
    CHECK(multiplicity_of(p13, IrrepKind::one_dim_mm) == 1);
    CHECK(multiplicity_of(p13, IrrepKind::one_dim_pm) == 1);
    CHECK(multiplicity_of(p13, IrrepKind::one_dim_mp) == 1);
    CHECK(multiplicity_of(s3[0], IrrepKind::two_dim, 2 * kPi / 3) == 1);

    const auto dup = fixtures::duplicated_irrep_control().rep;
    const auto sd = check_condition_star(dup);
    CHECK_FALSE(sd[0].multiplicity_free);
    CHECK(multiplicity_of(sd[0], IrrepKind::two_dim, 2 * kPi / 3) == 2);

    // Conjugation does not change the decomposition.
    const auto conj = build_representation(m5.cm, m5.summands, 99);
    CHECK(check_condition_star(conj)[0].constituents.size() == 2);
  }

  TEST_CASE("exponent recovery") {
    const auto m5 = fixtures::planted_dihedral(5).rep;
    auto rec = recover_exponent(m5.generators[0], m5.generators[1]);
    CHECK(rec.recovered == 5);
    CHECK_FALSE(rec.ambiguous);
    const auto inf = build_representation(CoxeterMatrix::dihedral(0), {dihedral(IrrepKind::two_dim, std::sqrt(2.0))});
    CHECK(recover_exponent(inf.generators[0], inf.generators[1]).recovered == 0);
    // A loose tolerance admits several orders for one cosine.
    CHECK(recover_exponent(m5.generators[0], m5.generators[1], 60, 5e-2).ambiguous);
  }

  TEST_CASE("character evidence") {
    const auto cm = CoxeterMatrix::dihedral(3);
    const auto triv = build_representation(cm, {{SummandKind::trivial, {}}});
    const auto sign = build_representation(cm, {{SummandKind::sign, {}}});
    const auto e = equivalence_evidence(triv.generators, sign.generators);
    CHECK(e.max_discrepancy == doctest::Approx(2.0));
    CHECK(e.worst_word == std::vector<int>{0});
    CHECK(equivalence_evidence(triv.generators, triv.generators).max_discrepancy == 0.0);
    // Reduced words over two letters: 1 + 2 * cap.
    CHECK(e.words == 17);
  }

  TEST_CASE("invariant subspace") {
    const auto rep = fixtures::planted_dihedral(3).rep;
    const auto whole = extract_invariant_subspace(rep.tuple());
    CHECK(whole.dim == rep.dim());
    Vector d(2);
    d << 0.5, Complex(0, 1);
    const MatrixTuple none({Matrix(d.asDiagonal()), Matrix::Identity(2, 2)});
    CHECK_THROWS_AS(extract_invariant_subspace(none), EmptySubspaceError);
  }

  TEST_CASE("conditions (I) and (II)") {
    const auto rep = fixtures::planted_dihedral(4).rep;
    const auto conj = build_representation(rep.cm, rep.summands, 5);
    CHECK(check_condition_I(conj.tuple(), rep).holds);
    for (const auto& r : check_condition_II(conj.tuple(), rep)) CHECK(r.holds);

    // Drop the one-dimensional summand from A: (I) fails.
    const auto part = build_representation(rep.cm, {rep.summands[0]});
    CHECK_FALSE(check_condition_I(part.tuple(), rep).holds);

    // B_1 with eigenvalue 1 plants a sheet through (1, 0): (II) fails there only.
    const auto ctl = fixtures::extra_sheet_control();
    for (const auto& r : check_condition_II(ctl.tuple, ctl.rep)) {
      const bool affected = r.coordinate == 0 && r.sign == 1;
      CHECK(r.holds == !affected);
      if (affected) CHECK(r.witness_side == "A");
    }
  }

  TEST_CASE("planted pipeline") {
    const auto f = fixtures::planted_dihedral(3);
    const auto r = rigidity_check(f.tuple, f.rep);
    CHECK(r.conditions_hold());
    CHECK(r.a1_normal);
    CHECK(r.norms_ok);
    CHECK(r.hypotheses_regular);
    CHECK(r.dim_L == f.rep.dim());
    CHECK(r.max_invariance_residual < 1e-8);
    CHECK(r.conclusion_1);
    CHECK(r.conclusion_2);
    CHECK(r.conclusion_3);
  }
}
