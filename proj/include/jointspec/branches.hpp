#pragma once

#include <string>
#include <vector>

#include "jointspec/pencil.hpp"
#include "jointspec/types.hpp"

namespace jointspec {

/// A_1 = sum lambda P_lambda for normal A_1.
struct SpectralResolution {
  std::vector<Complex> eigenvalues;
  std::vector<Matrix> projections;
  std::vector<int> multiplicities;

  /// Position of the eigenvalue within `tol` of lambda; throws UnknownEigenvalue.
  std::size_t index_of(Complex lambda, double tol = 1e-8) const;
};

/// Clusters the eigenvalues of a normal A_1 (single linkage) and assembles
/// orthogonal projections from its Schur vectors. cluster_tol <= 0 picks
/// 1e-8 * ||A_1||. Throws NotNormalError.
SpectralResolution spectral_resolution(const Matrix& a1, double cluster_tol = -1.0);

/// Reduced resolvent T_lambda = sum_{mu != lambda} P_mu / (lambda - mu).
struct TOperator {
  Complex base_eigenvalue;
  Matrix matrix;
};

TOperator t_operator(const SpectralResolution& res, Complex lambda);

enum class BranchKind { nonzero_lambda, zero_lambda };

/// zero_lambda when |lambda| <= 1e-10 max(1, ||A_1||).
BranchKind branch_kind(const Matrix& a1, Complex lambda);

struct BranchSample {
  double t = 0.0;
  Complex value;
  double residual = 0.0;  ///< relative smallest singular value at the sample
};

/// One local component through (1/lambda, 0) or, for lambda = 0, one
/// eigenvalue curve of A_1 + t B through 0. value(t) is x_1 resp. x_{n+1}.
struct Branch {
  Complex lambda;
  BranchKind kind = BranchKind::nonzero_lambda;
  Direction direction;
  int index = 0;
  std::vector<BranchSample> samples;  ///< sorted by t; both signs of t
  Complex d1, d2;
  double d1_error = 0.0, d2_error = 0.0;
  int multiplicity = 1;

  Complex base() const;
};

struct BranchOptions {
  double t_max = 1e-2;
  int samples = 8;
  double match_ratio = 4.0;
  double cluster_tol = 1e-6;  ///< in slope space (value - base) / t
};

/// Ladder t_k = t_max 2^{-k}, k = 0..samples-1.
std::vector<double> geometric_ladder(double t_max, int samples);

/// Tracks the roots converging to the base point along t -> +-0 and groups
/// coincident roots into one branch with multiplicity. d1, d2 are filled in
/// by branch_derivatives. Throws BranchCollision, UnknownEigenvalue.
std::vector<Branch> local_branches(const MatrixTuple& tuple, Complex lambda, const Direction& xhat,
                                   const BranchOptions& options = {});

struct BranchDerivatives {
  Complex d1, d2;
  double d1_error = 0.0, d2_error = 0.0;
};

/// Richardson-extrapolated central differences. Throws NonconvergentError.
BranchDerivatives branch_derivatives(const Branch& branch);

/// Matrix whose generalized problem yields the branch values at parameter t:
/// roots of det(x A_1 + t B - I) for lambda != 0, eigenvalues of A_1 + t B
/// for lambda = 0. Values are sorted by distance to `near`.
std::vector<Complex> branch_candidates(const MatrixTuple& tuple, Complex lambda,
                                       const Direction& xhat, double t, Complex near);

struct RegularityReport {
  Complex lambda;
  bool condition_a = false;
  bool condition_b = false;
  double branch_derivative_gaps = 0.0;
  double tangency_margin = 0.0;
  int branch_count = 0;
  int total_multiplicity = 0;
  std::string note;
};

struct RegularityOptions {
  BranchOptions branches;
  double gap_tol = 1e-6;
  double rate_growth = 4.0;  ///< allowed growth of |value - base| / |t| toward t -> 0
};

/// Conditions a) / b) (lambda != 0) and their lambda = 0 analogues along x^.
/// Never throws for numerical reasons: failures land in the booleans.
RegularityReport check_regularity(const MatrixTuple& tuple, Complex lambda, const Direction& xhat,
                                  const RegularityOptions& options = {});

/// Same test along several directions; true only if every probe passes.
/// Necessary, not sufficient, for n > 2.
std::vector<RegularityReport> probe_regularity(const MatrixTuple& tuple, Complex lambda,
                                               const std::vector<Direction>& directions,
                                               const RegularityOptions& options = {});

}  // namespace jointspec
