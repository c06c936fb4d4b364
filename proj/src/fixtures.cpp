#include "jointspec/fixtures.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "jointspec/analysis.hpp"
#include "jointspec/branches.hpp"
#include "jointspec/errors.hpp"
#include "jointspec/linalg.hpp"

namespace jointspec::fixtures {

namespace {

constexpr double kPi = std::numbers::pi;

Matrix real2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Summand dihedral(IrrepKind kind, double angle = 0.0) {
  return Summand{SummandKind::dihedral, DihedralIrrep{kind, angle}};
}

bool regular_at_every_eigenvalue(const MatrixTuple& pair, const std::vector<Complex>& lambdas) {
  Direction xhat(1);
  xhat(0) = 1.0;
  for (Complex lam : lambdas) {
    const auto r = check_regularity(pair, lam, xhat);
    if (!r.condition_a || !r.condition_b) return false;
  }
  return true;
}

PlantedFixture plant(std::string name, const CoxeterRep& rep, std::uint64_t seed,
                     std::optional<double> b1_eigenvalue = std::nullopt) {
  const auto blocks = avoiding_blocks(rep.cm.size(), 2, seed, b1_eigenvalue);
  return PlantedFixture{std::move(name), rep, planted_tuple(rep, blocks, seed + 1000)};
}

}  // namespace

MatrixTuple nonnormal_counterexample() {
  return MatrixTuple({real2(1, 1, 0, 1), real2(1, 0, 0, -1)});
}

MatrixTuple diagonal_lines() { return MatrixTuple({real2(1, 0, 0, 1), real2(1, 0, 0, -1)}); }

MatrixTuple dihedral_pair(double alpha) {
  const auto [g1, g2] = DihedralIrrep{IrrepKind::two_dim, alpha}.generators();
  return MatrixTuple({g1, g2});
}

MatrixTuple puiseux_pair() { return MatrixTuple({real2(1, 0, 1, 1), real2(0, 1, 0, 0)}); }

MatrixTuple zero_tuple(int size) {
  return MatrixTuple({Matrix::Zero(size, size), Matrix::Zero(size, size)});
}

RandomInstance random_normal_instance(std::uint64_t seed, const RandomInstanceOptions& options) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim_dist(options.min_dim, options.max_dim);
  std::uniform_real_distribution<double> modulus(0.5, 2.0), phase(-kPi, kPi);

  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    const int n = dim_dist(rng);
    const int distinct = options.repeated_eigenvalue ? n - 1 : n;
    std::vector<Complex> lambdas;
    if (options.zero_eigenvalue) lambdas.push_back(0.0);
    while (static_cast<int>(lambdas.size()) < distinct) {
      const Complex cand = std::polar(modulus(rng), phase(rng));
      bool separated = true;
      for (Complex l : lambdas) separated = separated && std::abs(l - cand) >= 0.4;
      if (separated) lambdas.push_back(cand);
    }
    Vector diag(n);
    for (int k = 0; k < distinct; ++k) diag(k) = lambdas[k];
    if (options.repeated_eigenvalue) diag(n - 1) = lambdas.back();  // the last drawn one; the zero comes first

    const Matrix u = linalg::random_unitary(n, rng);
    const Matrix a1 = u * diag.asDiagonal() * u.adjoint();
    Matrix a2(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a2(i, j) = linalg::complex_normal(rng) / std::sqrt(double(n));

    const MatrixTuple pair({a1, a2});
    if (regular_at_every_eigenvalue(pair, lambdas) &&
        regular_at_every_eigenvalue(product_pair(pair), lambdas)) {
      return RandomInstance{pair, seed, attempt};
    }
  }
  throw HypothesisError("no regular random instance within the attempt budget");
}

std::vector<Matrix> avoiding_blocks(int n, int size, std::uint64_t seed, std::optional<double> b1_eigenvalue) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.2, 0.5);
  std::bernoulli_distribution flip(0.5);
  std::vector<Matrix> out;

  Matrix b1 = Matrix::Zero(size, size);
  for (int k = 0; k < size; ++k) b1(k, k) = (flip(rng) ? 1.0 : -1.0) * mag(rng);
  if (b1_eigenvalue) b1(0, 0) = *b1_eigenvalue;
  out.push_back(b1);

  for (int j = 1; j < n; ++j) {
    Matrix b(size, size);
    for (int r = 0; r < size; ++r)
      for (int c = 0; c < size; ++c) b(r, c) = linalg::complex_normal(rng);
    out.push_back(0.45 * b / linalg::operator_norm(b));
  }
  return out;
}

PlantedFixture planted_dihedral(int m, std::uint64_t seed) {
  std::vector<Summand> summands;
  switch (m) {
    case 3: summands = {dihedral(IrrepKind::two_dim, 2 * kPi / 3), dihedral(IrrepKind::one_dim_pp)}; break;
    case 4: summands = {dihedral(IrrepKind::two_dim, kPi / 2), dihedral(IrrepKind::one_dim_pm)}; break;
    case 5: summands = {dihedral(IrrepKind::two_dim, 2 * kPi / 5), dihedral(IrrepKind::two_dim, 4 * kPi / 5)}; break;
    default: throw std::invalid_argument("planted dihedral fixtures exist for m = 3, 4, 5");
  }
  const auto rep = build_representation(CoxeterMatrix::dihedral(m), summands);
  return plant("dihedral_m" + std::to_string(m), rep, seed);
}

PlantedFixture planted_a3(std::uint64_t seed) {
  const auto rep = build_representation(CoxeterMatrix::type_a(3),
                                        {Summand{SummandKind::geometric, {}}, Summand{SummandKind::sign, {}}});
  return plant("type_a3", rep, seed);
}

PlantedFixture duplicated_irrep_control(std::uint64_t seed) {
  const auto rep = build_representation(
      CoxeterMatrix::dihedral(3),
      {dihedral(IrrepKind::two_dim, 2 * kPi / 3), dihedral(IrrepKind::two_dim, 2 * kPi / 3)});
  return plant("duplicated_irrep", rep, seed);
}

PlantedFixture extra_sheet_control(std::uint64_t seed) {
  const auto rep = build_representation(
      CoxeterMatrix::dihedral(3), {dihedral(IrrepKind::two_dim, 2 * kPi / 3), dihedral(IrrepKind::one_dim_pp)});
  return plant("extra_sheet", rep, seed, 1.0);
}

}  // namespace jointspec::fixtures
