#include "jointspec/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "jointspec/errors.hpp"
#include "jointspec/linalg.hpp"
#include "jointspec/richardson.hpp"

namespace jointspec {

namespace {

// Deterministic tree reduction of terms[lo, hi).
Matrix pairwise_sum(const std::vector<Matrix>& terms, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return terms[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(terms, lo, mid) + pairwise_sum(terms, mid, hi);
}

// Mean of r e^{i theta} (w - M)^{-1} over theta = 2 pi (k + shift) / n.
Matrix node_mean(const Matrix& m, const ContourSpec& c, int n, double shift) {
  const auto dim = m.rows();
  const Matrix eye = Matrix::Identity(dim, dim);
  std::vector<Matrix> terms;
  terms.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * (k + shift) / n;
    const Complex arm = c.radius * std::polar(1.0, theta);
    Matrix shifted = (c.center + arm) * eye - m;
    terms.push_back(arm * Eigen::PartialPivLU<Matrix>(shifted).solve(eye));
  }
  return pairwise_sum(terms, 0, terms.size()) / static_cast<double>(n);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Complex value_at(const MatrixTuple& tuple, const Branch& branch, double t) {
  for (const auto& s : branch.samples) {
    if (std::abs(s.t - t) <= 1e-14 * std::abs(t)) return s.value;
  }
  const Complex guess = branch.base() + branch.d1 * t + 0.5 * branch.d2 * t * t;
  const auto cands = branch_candidates(tuple, branch.lambda, branch.direction, t, guess);
  if (static_cast<int>(cands.size()) < branch.multiplicity) {
    throw SeparationFailure("branch value not found at requested t");
  }
  Complex sum = 0.0;
  for (int i = 0; i < branch.multiplicity; ++i) sum += cands[i];
  return sum / static_cast<double>(branch.multiplicity);
}

double fit_exponent(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [t, v] : pts) {
    const double x = std::log(t), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

}  // namespace

RieszResult riesz_projection(const Matrix& m, const ContourSpec& contour,
                             const QuadratureOptions& options) {
  if (m.rows() != m.cols()) throw DimensionMismatch("riesz_projection: matrix must be square");
  if (!(contour.radius > 0.0)) throw std::invalid_argument("contour radius must be positive");
  if (contour.quad_points < 8 || !is_power_of_two(contour.quad_points)) {
    throw std::invalid_argument("quad_points must be a power of two >= 8");
  }

  const double guard = 10.0 * std::numeric_limits<double>::epsilon() * linalg::operator_norm(m);
  for (Complex mu : linalg::eigenvalues(m)) {
    if (std::abs(std::abs(mu - contour.center) - contour.radius) <= guard) {
      std::ostringstream msg;
      msg << "eigenvalue " << mu << " lies on the contour |w - " << contour.center
          << "| = " << contour.radius;
      throw ContourError(msg.str());
    }
  }

  int n = contour.quad_points;
  Matrix current = node_mean(m, contour, n, 0.0);
  while (true) {
    // Nested rule: the 2n-point mean reuses the n old nodes.
    const Matrix odd = node_mean(m, contour, n, 0.5);
    Matrix next = 0.5 * (current + odd);
    n *= 2;
    const double change = (next - current).norm();
    current = std::move(next);
    if (change <= options.tol * std::max(1.0, current.norm())) {
      return {current, n, change};
    }
    if (n >= options.max_points) {
      std::ostringstream msg;
      msg << "contour quadrature not settled at " << n << " nodes (change " << change << ")";
      throw NonconvergentError(msg.str());
    }
  }
}

ComponentProjection component_projection(const MatrixTuple& tuple, const Branch& branch, double t,
                                         const QuadratureOptions& options) {
  ComponentProjection out;
  out.branch_index = branch.index;
  out.lambda = branch.lambda;
  out.t = t;
  out.value = value_at(tuple, branch, t);

  const Matrix trans = tuple.transverse(branch.direction);
  Matrix m;
  Complex center;
  if (branch.kind == BranchKind::nonzero_lambda) {
    m = out.value * tuple[0] + t * trans;
    center = 1.0;
  } else {
    m = tuple[0] + t * trans;
    m.diagonal().array() -= out.value;
    center = 0.0;
  }

  auto eig = linalg::eigenvalues(m);
  std::sort(eig.begin(), eig.end(), [&](Complex a, Complex b) {
    return std::abs(a - center) < std::abs(b - center);
  });
  const int own = branch.multiplicity;
  double radius = 0.5;
  if (static_cast<int>(eig.size()) > own) {
    const double reach = std::abs(eig[own - 1] - center);
    const double gap = std::abs(eig[own] - center);
    if (!(reach < 0.25 * gap) || gap <= 1e-12 * (1.0 + linalg::operator_norm(m))) {
      std::ostringstream msg;
      msg << "branch " << branch.index << " at t=" << t << ": own eigenvalues reach " << reach
          << " but the nearest other eigenvalue is at " << gap;
      throw SeparationFailure(msg.str());
    }
    radius = 0.5 * gap;
  }
  out.contour = ContourSpec{center, radius, 8};
  const auto res = riesz_projection(m, out.contour, options);
  out.matrix = res.projection;
  out.quad_points = res.quad_points;
  out.idempotency_residual = linalg::operator_norm(out.matrix * out.matrix - out.matrix);
  out.rank = static_cast<int>(std::lround(out.matrix.trace().real()));
  return out;
}

NormProfile projection_norm_profile(const MatrixTuple& tuple, const Branch& branch,
                                    const std::vector<double>& ts, const QuadratureOptions& options) {
  std::vector<double> grid = ts;
  if (grid.empty()) {
    for (const auto& s : branch.samples)
      if (s.t > 0.0) grid.push_back(s.t);
  }
  std::sort(grid.begin(), grid.end());
  NormProfile profile;
  for (double t : grid) {
    const auto p = component_projection(tuple, branch, t, options);
    profile.points.emplace_back(t, linalg::operator_norm(p.matrix));
  }
  profile.exponent = fit_exponent(profile.points);
  return profile;
}

LimitProjection limit_projection(const MatrixTuple& tuple, const Branch& branch,
                                 const QuadratureOptions& options) {
  LimitProjection out;
  out.branch_index = branch.index;
  out.lambda = branch.lambda;
  out.direction = branch.direction;

  std::vector<double> hs;
  for (const auto& s : branch.samples)
    if (s.t > 0.0) hs.push_back(s.t);
  std::sort(hs.begin(), hs.end(), std::greater<>());
  if (hs.size() < 3) throw NonconvergentError("limit projection needs at least 3 ladder points");

  std::vector<Matrix> plus, minus;
  std::vector<std::pair<double, double>> profile;
  for (double h : hs) {
    auto p = component_projection(tuple, branch, h, options);
    auto q = component_projection(tuple, branch, -h, options);
    profile.emplace_back(h, linalg::operator_norm(p.matrix));
    plus.push_back(p.matrix);
    minus.push_back(q.matrix);
    out.ladder.push_back(std::move(q));
    out.ladder.push_back(std::move(p));
  }
  std::sort(out.ladder.begin(), out.ladder.end(),
            [](const ComponentProjection& a, const ComponentProjection& b) { return a.t < b.t; });

  std::sort(profile.begin(), profile.end());
  const double exponent = fit_exponent(profile);
  const double growth = profile.front().second / profile.back().second;
  if (exponent < -0.5 && growth > 4.0) {
    std::ostringstream msg;
    msg << "component projection norms grow like t^" << exponent << " as t -> 0 (x"
        << growth << " over the ladder); A1 is likely not normal";
    throw BlowUpError(msg.str(), exponent, profile);
  }

  const double ratio = hs[0] / hs[1];
  const double factor = ratio * ratio;
  auto op = [](const Matrix& a) { return linalg::operator_norm(a); };

  std::vector<Matrix> even, odd;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    even.push_back(0.5 * (plus[k] + minus[k]));
    odd.push_back((plus[k] - minus[k]) / (2.0 * hs[k]));
  }
  const auto limit = richardson(even, factor, op);
  out.matrix = limit.value;
  out.extrapolation_error = limit.error;

  const auto first = richardson(odd, factor, op);
  out.derivative = first.value;
  out.derivative_error = first.error;

  std::vector<Matrix> curv;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    curv.push_back((plus[k] + minus[k] - 2.0 * out.matrix) / (hs[k] * hs[k]));
  }
  const auto second = richardson(curv, factor, op);
  out.second_derivative = second.value;
  out.second_derivative_error = second.error;

  out.idempotency_residual = linalg::operator_norm(out.matrix * out.matrix - out.matrix);
  out.rank = static_cast<int>(std::lround(out.matrix.trace().real()));
  return out;
}

}  // namespace jointspec
