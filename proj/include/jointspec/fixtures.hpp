#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jointspec/coxeter.hpp"
#include "jointspec/pencil.hpp"

namespace jointspec::fixtures {

/// A_1 = [[1,1],[0,1]], A_2 = diag(1,-1): two transversal lines through (1,0)
/// whose component projections blow up like 1/t.
MatrixTuple nonnormal_counterexample();

/// A_1 = I, A_2 = diag(1,-1): the lines x_1 + x_2 = 1 and x_1 - x_2 = 1.
MatrixTuple diagonal_lines();

/// (rho(g_1), rho(g_2)) of the two-dimensional dihedral irrep with angle alpha.
MatrixTuple dihedral_pair(double alpha);

/// A_1 = [[1,0],[1,1]], A_2 = [[0,1],[0,0]]: x_1 = 1 +- sqrt(t) near (1,0),
/// so condition a) fails.
MatrixTuple puiseux_pair();

/// n = 2 zero matrices of size N; the proper joint spectrum is empty.
MatrixTuple zero_tuple(int size = 2);

struct RandomInstanceOptions {
  int min_dim = 4, max_dim = 8;
  bool zero_eigenvalue = false;  ///< force 0 into sigma(A_1)
  bool repeated_eigenvalue = true;  ///< one eigenvalue of multiplicity 2
  int max_attempts = 50;
};

struct RandomInstance {
  MatrixTuple tuple;
  std::uint64_t seed = 0;
  int attempts = 0;  ///< draws rejected before this one, plus one
};

/// Random normal A_1 = U diag(lambda) U* with well separated eigenvalues and a
/// Gaussian A_2, redrawn until (A_1, A_2) and (A_1, A_1 A_2) pass conditions
/// a), b) at every eigenvalue. Throws HypothesisError after max_attempts.
RandomInstance random_normal_instance(std::uint64_t seed, const RandomInstanceOptions& options = {});

/// Blocks B_1, ..., B_n of the given size whose extended pencil stays away
/// from the points (+-1, 0, ...): B_1 real diagonal with entries of modulus
/// in [0.2, 0.5] (or containing `b1_eigenvalue`), B_j Gaussian rescaled to
/// operator norm 0.45.
std::vector<Matrix> avoiding_blocks(int n, int size, std::uint64_t seed,
                                    std::optional<double> b1_eigenvalue = std::nullopt);

struct PlantedFixture {
  std::string name;
  CoxeterRep rep;
  MatrixTuple tuple;
};

/// U (rho(g_i) + B_i) U* for multiplicity-free dihedral rho, m in {3, 4, 5}:
/// m = 3: two_dim(2pi/3) + pp;  m = 4: two_dim(pi/2) + pm;
/// m = 5: two_dim(2pi/5) + two_dim(4pi/5).
PlantedFixture planted_dihedral(int m, std::uint64_t seed = 11);

/// Type A_3 with rho = geometric + sign.
PlantedFixture planted_a3(std::uint64_t seed = 13);

/// m = 3 with two_dim(2pi/3) repeated: only condition (*) fails.
PlantedFixture duplicated_irrep_control(std::uint64_t seed = 17);

/// m = 3 planted with B_1 having eigenvalue 1: an extra sheet through
/// (1, 0, ...), so only condition (II) fails.
PlantedFixture extra_sheet_control(std::uint64_t seed = 19);

}  // namespace jointspec::fixtures
