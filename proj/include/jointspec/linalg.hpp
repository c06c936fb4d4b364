#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "jointspec/types.hpp"

namespace jointspec::linalg {

/// Generalized eigenvalues w of the pencil A v = w B v, as (alpha, beta)
/// pairs with w = alpha / beta. beta == 0 marks an infinite eigenvalue.
struct GeneralizedSpectrum {
  std::vector<Complex> alpha;
  std::vector<Complex> beta;
};

/// QZ-based generalized eigenvalues (LAPACK zggev). Throws EigensolverError.
GeneralizedSpectrum generalized_eigenvalues(const Matrix& a, const Matrix& b);

/// Eigenvalues of a general complex matrix.
std::vector<Complex> eigenvalues(const Matrix& m);

double operator_norm(const Matrix& m);
double min_singular_value(const Matrix& m);

/// Haar-distributed unitary matrix (QR of a complex Ginibre matrix with
/// the phases of R's diagonal divided out).
Matrix random_unitary(int n, std::mt19937_64& rng);

/// Complex standard normal sample, E|z|^2 = 1.
Complex complex_normal(std::mt19937_64& rng);

/// Unit vector in C^n with Gaussian-distributed direction.
Vector random_unit_vector(int n, std::mt19937_64& rng);

/// Block-diagonal sum of square blocks.
Matrix direct_sum(const Matrix& a, const Matrix& b);

}  // namespace jointspec::linalg
