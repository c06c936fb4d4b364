#pragma once

#include <span>
#include <vector>

#include "jointspec/types.hpp"

namespace jointspec {

/// The pencil data (A_1, ..., A_n): n >= 1 square complex matrices of a
/// common size N >= 1. The identity A_{n+1} = I is implied and never stored.
class MatrixTuple {
 public:
  explicit MatrixTuple(std::vector<Matrix> matrices);

  /// Promotes real matrices to complex.
  static MatrixTuple from_real(const std::vector<Eigen::MatrixXd>& matrices);

  int size() const noexcept { return static_cast<int>(matrices_.size()); }
  int dim() const noexcept { return static_cast<int>(matrices_.front().rows()); }

  /// Zero-based: operator[](0) is A_1.
  const Matrix& operator[](int k) const { return matrices_.at(static_cast<std::size_t>(k)); }
  std::span<const Matrix> matrices() const noexcept { return matrices_; }

  /// Sum_{k>=2} xhat_{k} A_k for a direction of length n - 1.
  Matrix transverse(const Direction& xhat) const;

 private:
  std::vector<Matrix> matrices_;
};

/// x_1 A_1 + ... + x_n A_n.
Matrix evaluate_pencil(const MatrixTuple& tuple, const PencilPoint& x);

/// det(x_1 A_1 + ... + x_n A_n - I).
Complex det_proper(const MatrixTuple& tuple, const PencilPoint& x);

/// det(x_1 A_1 + ... + x_n A_n - x_{n+1} I); equals det_proper at x_{n+1} = 1.
Complex det_projective(const MatrixTuple& tuple, const PencilPoint& x, Complex x_last);

/// sigma_min(sum x_k A_k - I) / (1 + ||sum x_k A_k||).
double spectral_distance(const MatrixTuple& tuple, const PencilPoint& x);

/// Membership in the proper joint spectrum, judged by the relative
/// smallest singular value rather than |det|.
bool is_spectral_point(const MatrixTuple& tuple, const PencilPoint& x, double tol);

struct Roots {
  std::vector<Complex> finite;  ///< with multiplicity, in solver order
  int infinite = 0;
};

/// Roots s of det(sum_k x_k A_k - I) = 0 on the complex line
/// x = offset + s e_lead (offset's lead entry is ignored), computed as the
/// generalized eigenvalues of (I - sum_{k != lead} offset_k A_k, A_lead).
Roots lead_roots(const MatrixTuple& tuple, int lead, const PencilPoint& offset);

/// All x_1 with det(x_1 A_1 + scale * sum_{k>=2} xhat_k A_k - I) = 0.
/// Infinite generalized eigenvalues (A_1 singular) are counted separately.
Roots slice_roots(const MatrixTuple& tuple, const Direction& xhat, Complex scale);

struct NormalityReport {
  double commutator_norm = 0.0;
  bool is_normal = false;
  bool is_diagonalizable = false;
};

/// Default tolerance scales with ||A||^2 so that it is invariant to rescaling.
NormalityReport normality(const Matrix& a, double tol = -1.0);

struct GridSpec {
  double x1_min = -2.0, x1_max = 2.0;
  double x2_min = -2.0, x2_max = 2.0;
  int n1 = 64, n2 = 64;
};

/// Points of a real slice of sigma_p for n = 2. Each grid cell runs at most
/// five Newton steps on det_proper in x_1 starting from its center; a cell
/// contributes a point only if Newton lands inside the cell on the spectrum.
/// Output is sorted lexicographically by (x1.re, x1.im, x2.re, x2.im).
std::vector<PencilPoint> sample_spectrum_curve(const MatrixTuple& tuple, const GridSpec& grid);

}  // namespace jointspec
