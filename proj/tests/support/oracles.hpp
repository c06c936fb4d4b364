#pragma once

// Independent reference computations for the tests. None of these call the
// library's branch tracking, quadrature or extrapolation code.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "jointspec/types.hpp"

namespace oracle {

using jointspec::Complex;
using jointspec::Matrix;
using LComplex = std::complex<long double>;
using LMatrix = Eigen::Matrix<LComplex, Eigen::Dynamic, Eigen::Dynamic>;

inline LMatrix widen(const Matrix& m) { return m.cast<LComplex>(); }

inline Matrix narrow(const LMatrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out(r, c) = Complex(static_cast<double>(m(r, c).real()), static_cast<double>(m(r, c).imag()));
  return out;
}

inline double opnorm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

/// Derivatives at t = 0 of the root x(t) of det(x A + t B - I) = 0 through
/// (x0, 0), by implicit differentiation of the 2x2 determinant.
struct Derivs {
  Complex d1, d2;
};

inline Derivs implicit_derivatives_2x2(const Matrix& a, const Matrix& b, Complex x0) {
  const Matrix x = x0 * a - Matrix::Identity(2, 2);
  const Complex fx = a(0, 0) * x(1, 1) + x(0, 0) * a(1, 1) - a(0, 1) * x(1, 0) - x(0, 1) * a(1, 0);
  const Complex ft = b(0, 0) * x(1, 1) + x(0, 0) * b(1, 1) - b(0, 1) * x(1, 0) - x(0, 1) * b(1, 0);
  const Complex fxx = 2.0 * (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
  const Complex ftt = 2.0 * (b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0));
  const Complex fxt = a(0, 0) * b(1, 1) + b(0, 0) * a(1, 1) - a(0, 1) * b(1, 0) - b(0, 1) * a(1, 0);
  const Complex d1 = -ft / fx;
  const Complex d2 = -(ftt + 2.0 * fxt * d1 + fxx * d1 * d1) / fx;
  return {d1, d2};
}

/// Roots x of det(x A + t B - I) = 0 for 2x2 A, B by the quadratic formula.
inline std::vector<Complex> quadratic_roots_2x2(const Matrix& a, const Matrix& b, double t) {
  // det((x A + C)) with C = t B - I is  qa x^2 + qb x + qc.
  const Matrix c = t * b - Matrix::Identity(2, 2);
  const Complex qa = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const Complex qb = a(0, 0) * c(1, 1) + c(0, 0) * a(1, 1) - a(0, 1) * c(1, 0) - c(0, 1) * a(1, 0);
  const Complex qc = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
  if (std::abs(qa) < 1e-14) return {-qc / qb};
  const Complex disc = std::sqrt(qb * qb - 4.0 * qa * qc);
  // Stable pairing: one root from the larger-magnitude combination.
  const Complex q = -0.5 * (qb + (std::real(std::conj(qb) * disc) >= 0 ? disc : -disc));
  return {q / qa, qc / q};
}

/// Spectral projection of a 2x2 matrix at its eigenvalue mu: (M - nu I) / (mu - nu)
/// with nu the other eigenvalue.
inline Matrix eigenprojection_2x2(const Matrix& m, Complex mu) {
  const Complex nu = m.trace() - mu;
  return (m - nu * Matrix::Identity(2, 2)) / (mu - nu);
}

/// Long double eigenprojection of a simple eigenvalue of m near `target`.
struct LEigen {
  LComplex value;
  LMatrix projection;
};

inline LEigen eigenprojection_ld(const LMatrix& m, LComplex target) {
  Eigen::ComplexEigenSolver<LMatrix> right(m);
  Eigen::ComplexEigenSolver<LMatrix> left(LMatrix(m.adjoint()));
  Eigen::Index ir = 0, il = 0;
  for (Eigen::Index k = 1; k < m.rows(); ++k) {
    if (std::abs(right.eigenvalues()(k) - target) < std::abs(right.eigenvalues()(ir) - target)) ir = k;
    if (std::abs(std::conj(left.eigenvalues()(k)) - target) < std::abs(std::conj(left.eigenvalues()(il)) - target)) il = k;
  }
  const auto v = right.eigenvectors().col(ir);
  const auto w = left.eigenvectors().col(il);
  const LComplex denom = (w.adjoint() * v)(0, 0);
  return {right.eigenvalues()(ir), (v * w.adjoint()) / denom};
}

/// Direct eigenprojection for the branch through (1/lambda, 0) at parameter t
/// in long double: Newton on x so that x A_1 + t A_2 has eigenvalue exactly 1,
/// then v w^* / (w^* v). For lambda = 0 the projection of A_1 + t A_2 at its
/// eigenvalue near x_guess.
inline Matrix branch_projection_ld(const Matrix& a1, const Matrix& a2, Complex lambda, Complex x_guess,
                                   long double t) {
  const LMatrix la1 = widen(a1), la2 = widen(a2);
  if (lambda == Complex(0.0)) {
    return narrow(eigenprojection_ld(la1 + t * la2, LComplex(x_guess.real(), x_guess.imag())).projection);
  }
  LComplex x(x_guess.real(), x_guess.imag());
  for (int it = 0; it < 40; ++it) {
    const LMatrix m = x * la1 + t * la2;
    const auto e = eigenprojection_ld(m, LComplex(1.0L));
    // d mu / d x = tr(P A_1) for the simple eigenvalue mu.
    const LComplex slope = (e.projection * la1).trace();
    const LComplex step = (e.value - LComplex(1.0L)) / slope;
    x -= step;
    if (std::abs(step) < 1e-19L * std::abs(x)) break;
  }
  return narrow(eigenprojection_ld(x * la1 + t * la2, LComplex(1.0L)).projection);
}

/// First-order perturbation slopes for the branches through (1/lambda, 0) of a
/// normal A_1: d1 = -beta / lambda with beta the eigenvalues of the compression
/// of A_2 to the lambda-eigenspace (basis q).
inline std::vector<Complex> perturbation_slopes(const Matrix& q, const Matrix& a2, Complex lambda) {
  const Matrix c = q.adjoint() * a2 * q;
  Eigen::ComplexEigenSolver<Matrix> es(c);
  std::vector<Complex> out;
  for (Eigen::Index k = 0; k < c.rows(); ++k) {
    out.push_back(lambda == Complex(0.0) ? es.eigenvalues()(k) : -es.eigenvalues()(k) / lambda);
  }
  return out;
}

}  // namespace oracle
