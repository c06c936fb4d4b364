#include "jointspec/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "jointspec/errors.hpp"
#include "jointspec/linalg.hpp"

namespace jointspec {

MatrixTuple::MatrixTuple(std::vector<Matrix> matrices) : matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw DimensionMismatch("MatrixTuple: need at least one matrix");
  const auto n = matrices_.front().rows();
  if (n < 1) throw DimensionMismatch("MatrixTuple: matrices must be at least 1x1");
  for (std::size_t k = 0; k < matrices_.size(); ++k) {
    if (matrices_[k].rows() != n || matrices_[k].cols() != n) {
      throw DimensionMismatch("MatrixTuple: matrix " + std::to_string(k + 1) +
                              " is not " + std::to_string(n) + "x" + std::to_string(n));
    }
  }
}

MatrixTuple MatrixTuple::from_real(const std::vector<Eigen::MatrixXd>& matrices) {
  std::vector<Matrix> promoted;
  promoted.reserve(matrices.size());
  for (const auto& m : matrices) promoted.emplace_back(m.cast<Complex>());
  return MatrixTuple(std::move(promoted));
}

Matrix MatrixTuple::transverse(const Direction& xhat) const {
  if (xhat.size() != size() - 1) {
    throw DimensionMismatch("direction must have n-1 = " + std::to_string(size() - 1) + " entries");
  }
  Matrix out = Matrix::Zero(dim(), dim());
  for (int k = 1; k < size(); ++k) out += xhat(k - 1) * matrices_[static_cast<std::size_t>(k)];
  return out;
}

Matrix evaluate_pencil(const MatrixTuple& tuple, const PencilPoint& x) {
  if (x.size() != tuple.size()) {
    throw DimensionMismatch("point has " + std::to_string(x.size()) + " coordinates, tuple has " +
                            std::to_string(tuple.size()) + " matrices");
  }
  Matrix out = Matrix::Zero(tuple.dim(), tuple.dim());
  for (int k = 0; k < tuple.size(); ++k) out += x(k) * tuple[k];
  return out;
}

Complex det_proper(const MatrixTuple& tuple, const PencilPoint& x) {
  return det_projective(tuple, x, Complex(1.0));
}

Complex det_projective(const MatrixTuple& tuple, const PencilPoint& x, Complex x_last) {
  Matrix m = evaluate_pencil(tuple, x);
  m.diagonal().array() -= x_last;
  return m.determinant();
}

double spectral_distance(const MatrixTuple& tuple, const PencilPoint& x) {
  const Matrix pencil = evaluate_pencil(tuple, x);
  Matrix shifted = pencil;
  shifted.diagonal().array() -= 1.0;
  return linalg::min_singular_value(shifted) / (1.0 + linalg::operator_norm(pencil));
}

bool is_spectral_point(const MatrixTuple& tuple, const PencilPoint& x, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("is_spectral_point: tol must be positive");
  return spectral_distance(tuple, x) <= tol;
}

Roots lead_roots(const MatrixTuple& tuple, int lead, const PencilPoint& offset) {
  if (lead < 0 || lead >= tuple.size()) throw DimensionMismatch("lead index out of range");
  if (offset.size() != tuple.size()) throw DimensionMismatch("offset must have n coordinates");

  Matrix lhs = Matrix::Identity(tuple.dim(), tuple.dim());
  for (int k = 0; k < tuple.size(); ++k) {
    if (k != lead) lhs -= offset(k) * tuple[k];
  }
  const Matrix& rhs = tuple[lead];
  const auto spectrum = linalg::generalized_eigenvalues(lhs, rhs);

  const double scale = std::max(rhs.norm(), lhs.norm());
  Roots roots;
  for (std::size_t i = 0; i < spectrum.alpha.size(); ++i) {
    const Complex alpha = spectrum.alpha[i];
    const Complex beta = spectrum.beta[i];
    const bool infinite = std::abs(beta) <= 1e-13 * scale || std::abs(alpha) > 1e13 * std::abs(beta);
    if (infinite) {
      ++roots.infinite;
    } else {
      roots.finite.push_back(alpha / beta);
    }
  }
  return roots;
}

Roots slice_roots(const MatrixTuple& tuple, const Direction& xhat, Complex scale) {
  if (xhat.size() != tuple.size() - 1) {
    throw DimensionMismatch("slice_roots: direction must have n-1 entries");
  }
  PencilPoint offset(tuple.size());
  offset(0) = 0.0;
  offset.tail(tuple.size() - 1) = scale * xhat;
  return lead_roots(tuple, 0, offset);
}

NormalityReport normality(const Matrix& a, double tol) {
  NormalityReport report;
  const Matrix adj = a.adjoint();
  report.commutator_norm = linalg::operator_norm(a * adj - adj * a);
  const double scale = std::max(1.0, a.squaredNorm());
  if (tol <= 0.0) tol = 1e-10 * scale;
  report.is_normal = report.commutator_norm <= tol;

  Eigen::ComplexEigenSolver<Matrix> solver(a);
  if (solver.info() == Eigen::Success) {
    Eigen::JacobiSVD<Matrix> svd(solver.eigenvectors());
    const auto& s = svd.singularValues();
    const double smallest = s(s.size() - 1);
    report.is_diagonalizable = smallest > 0.0 && s(0) / smallest < 1e10;
  }
  return report;
}

namespace {

bool lexicographic_less(const PencilPoint& a, const PencilPoint& b) {
  for (int k = 0; k < a.size(); ++k) {
    if (a(k).real() != b(k).real()) return a(k).real() < b(k).real();
    if (a(k).imag() != b(k).imag()) return a(k).imag() < b(k).imag();
  }
  return false;
}

}  // namespace

std::vector<PencilPoint> sample_spectrum_curve(const MatrixTuple& tuple, const GridSpec& grid) {
  if (tuple.size() != 2) throw DimensionMismatch("sample_spectrum_curve requires n = 2");
  if (grid.n1 < 1 || grid.n2 < 1 || !(grid.x1_max > grid.x1_min) || !(grid.x2_max > grid.x2_min)) {
    throw std::invalid_argument("sample_spectrum_curve: empty grid");
  }
  constexpr int kMaxNewtonSteps = 5;
  constexpr double kAcceptTol = 1e-10;

  const double h1 = (grid.x1_max - grid.x1_min) / grid.n1;
  const double h2 = (grid.x2_max - grid.x2_min) / grid.n2;
  const Matrix& a1 = tuple[0];
  const Matrix& a2 = tuple[1];

  std::vector<PencilPoint> points;
  for (int j = 0; j < grid.n2; ++j) {
    const double x2 = grid.x2_min + (j + 0.5) * h2;
    for (int i = 0; i < grid.n1; ++i) {
      const double center = grid.x1_min + (i + 0.5) * h1;
      Complex x1 = center;
      for (int step = 0; step < kMaxNewtonSteps; ++step) {
        Matrix m = x1 * a1 + x2 * a2;
        m.diagonal().array() -= 1.0;
        // d/dx1 det(M) = det(M) tr(M^{-1} A_1), so the Newton step is -1/tr(M^{-1} A_1).
        const Complex trace = Eigen::PartialPivLU<Matrix>(m).solve(a1).trace();
        const Complex delta = -1.0 / trace;
        if (!std::isfinite(delta.real()) || !std::isfinite(delta.imag())) break;
        x1 += delta;
        if (std::abs(delta) <= 1e-14 * (1.0 + std::abs(x1))) {
          break;
        }
      }
      if (!std::isfinite(x1.real()) || !std::isfinite(x1.imag())) continue;
      if (std::abs(x1 - center) > 0.5 * h1) continue;
      if (x1.real() < center - 0.5 * h1 || x1.real() >= center + 0.5 * h1) continue;
      PencilPoint x(2);
      x << x1, Complex(x2);
      if (is_spectral_point(tuple, x, kAcceptTol)) points.push_back(std::move(x));
    }
  }
  std::sort(points.begin(), points.end(), lexicographic_less);
  return points;
}

}  // namespace jointspec
