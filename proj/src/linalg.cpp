#include "jointspec/linalg.hpp"

#include <cmath>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "jointspec/errors.hpp"

namespace jointspec::linalg {

GeneralizedSpectrum generalized_eigenvalues(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionMismatch("generalized_eigenvalues: pencil blocks must be square and equal-sized");
  }
  const lapack_int n = static_cast<lapack_int>(a.rows());
  GeneralizedSpectrum out;
  if (n == 0) return out;

  // zggev overwrites its inputs; Eigen storage is column-major already.
  Matrix a_work = a;
  Matrix b_work = b;
  out.alpha.resize(static_cast<std::size_t>(n));
  out.beta.resize(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zggev(
      LAPACK_COL_MAJOR, 'N', 'N', n, a_work.data(), n, b_work.data(), n,
      out.alpha.data(), out.beta.data(), nullptr, n, nullptr, n);
  if (info != 0) {
    throw EigensolverError("zggev failed with info=" + std::to_string(info));
  }
  return out;
}

std::vector<Complex> eigenvalues(const Matrix& m) {
  Eigen::ComplexEigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw EigensolverError("complex eigensolver did not converge");
  }
  const auto& values = solver.eigenvalues();
  return {values.data(), values.data() + values.size()};
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double min_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

Complex complex_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {re, im};
}

Matrix random_unitary(int n, std::mt19937_64& rng) {
  Matrix z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = complex_normal(rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

Vector random_unit_vector(int n, std::mt19937_64& rng) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = complex_normal(rng);
  return v / v.norm();
}

Matrix direct_sum(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace jointspec::linalg
