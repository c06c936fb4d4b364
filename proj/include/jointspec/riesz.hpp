#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "jointspec/branches.hpp"
#include "jointspec/pencil.hpp"

namespace jointspec {

struct ContourSpec {
  Complex center;
  double radius = 0.5;
  int quad_points = 8;  ///< initial node count, a power of two >= 8
};

struct QuadratureOptions {
  double tol = 1e-10;     ///< successive-difference target, relative to max(1, ||P||)
  int max_points = 1 << 14;
};

struct RieszResult {
  Matrix projection;
  int quad_points = 0;    ///< nodes used by the accepted rule
  double last_change = 0.0;
};

/// (1/2 pi i) times the trapezoid rule for the resolvent over the circle,
/// doubling the node count until two successive rules agree.
/// Throws ContourError, NonconvergentError.
RieszResult riesz_projection(const Matrix& m, const ContourSpec& contour,
                             const QuadratureOptions& options = {});

struct ComponentProjection {
  int branch_index = 0;
  Complex lambda;
  double t = 0.0;
  Complex value;  ///< branch value used to assemble the pencil
  Matrix matrix;
  ContourSpec contour;
  int quad_points = 0;
  double idempotency_residual = 0.0;
  int rank = 0;
};

/// P_{j,lambda}(t x^): the Riesz projection of x_j(t) A_1 + t B around 1, or of
/// A_1 + t B - x_j(t) I around 0 for lambda = 0. The radius is half the gap to
/// the nearest eigenvalue not owned by the branch. Throws SeparationFailure.
ComponentProjection component_projection(const MatrixTuple& tuple, const Branch& branch, double t,
                                         const QuadratureOptions& options = {});

struct LimitProjection {
  int branch_index = 0;
  Complex lambda;
  Direction direction;
  Matrix matrix;
  double extrapolation_error = 0.0;
  std::optional<Matrix> derivative;
  double derivative_error = 0.0;
  std::optional<Matrix> second_derivative;
  double second_derivative_error = 0.0;
  double idempotency_residual = 0.0;
  int rank = 0;
  std::vector<ComponentProjection> ladder;  ///< the P(t) samples used
};

struct NormProfile {
  std::vector<std::pair<double, double>> points;  ///< (t, ||P(t)||), t > 0
  double exponent = 0.0;                          ///< least-squares slope of log||P|| on log t
};

/// Norms of P(t) over the positive samples of the branch (or over `ts`).
NormProfile projection_norm_profile(const MatrixTuple& tuple, const Branch& branch,
                                    const std::vector<double>& ts = {},
                                    const QuadratureOptions& options = {});

/// Richardson extrapolation of P(t) to t = 0: the even part gives the limit,
/// odd differences the first derivative, the remainder the second.
/// Throws BlowUpError when ||P(t)|| grows like a negative power of t.
LimitProjection limit_projection(const MatrixTuple& tuple, const Branch& branch,
                                 const QuadratureOptions& options = {});

}  // namespace jointspec
