#include "jointspec/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "jointspec/errors.hpp"
#include "jointspec/linalg.hpp"

namespace jointspec {

namespace {

RelationReport make_report(RelationId id, Complex lambda, std::vector<int> branches, double residual,
                           double tolerance, std::string variant = {}) {
  RelationReport r;
  r.id = id;
  r.lambda = lambda;
  r.branches = std::move(branches);
  r.residual = residual;
  r.tolerance = tolerance;
  r.pass = residual <= tolerance;
  r.variant = std::move(variant);
  return r;
}

bool is_zero_kind(const Branch& b) { return b.kind == BranchKind::zero_lambda; }

void require_simple(const Branch& b, const char* what) {
  if (b.multiplicity != 1) {
    std::ostringstream msg;
    msg << what << " requires a multiplicity-1 branch (branch " << b.index << " has "
        << b.multiplicity << ")";
    throw HypothesisError(msg.str());
  }
}

const Matrix& derivative_of(const LimitProjection& p) {
  if (!p.derivative) throw NonconvergentError("limit projection carries no derivative");
  return *p.derivative;
}

}  // namespace

std::string to_string(RelationId id) {
  switch (id) {
    case RelationId::orthogonality: return "orthogonality";
    case RelationId::resolution: return "resolution";
    case RelationId::cross_moment_zero: return "cross_moment_zero";
    case RelationId::first_moment: return "first_moment";
    case RelationId::first_moment_zero_case: return "first_moment_zero_case";
    case RelationId::second_moment: return "second_moment";
    case RelationId::second_moment_zero_case: return "second_moment_zero_case";
    case RelationId::prime_relation_1: return "prime_relation_1";
    case RelationId::prime_relation_2: return "prime_relation_2";
    case RelationId::prime_relation_3: return "prime_relation_3";
    case RelationId::prime_relation_4: return "prime_relation_4";
    case RelationId::same_projection_lemma: return "same_projection_lemma";
    case RelationId::square_relation: return "square_relation";
  }
  return "unknown";
}

std::vector<RelationReport> verify_orthogonality_and_resolution(
    const std::vector<LimitProjection>& projections, const SpectralResolution& res, Complex lambda,
    double tolerance) {
  if (projections.empty()) throw std::invalid_argument("no limit projections given");
  for (const auto& p : projections) {
    if (p.direction.size() != projections.front().direction.size() ||
        (p.direction - projections.front().direction).norm() > 1e-14) {
      throw DimensionMismatch("limit projections were taken along different directions");
    }
  }
  std::vector<RelationReport> out;
  for (std::size_t i = 0; i < projections.size(); ++i) {
    for (std::size_t j = 0; j < projections.size(); ++j) {
      if (i == j) continue;
      const double r = linalg::operator_norm(projections[i].matrix * projections[j].matrix);
      out.push_back(make_report(RelationId::orthogonality, lambda,
                                {projections[i].branch_index, projections[j].branch_index}, r,
                                tolerance));
    }
  }
  Matrix sum = Matrix::Zero(projections.front().matrix.rows(), projections.front().matrix.cols());
  std::vector<int> idx;
  for (const auto& p : projections) {
    sum += p.matrix;
    idx.push_back(p.branch_index);
  }
  const auto k = res.index_of(lambda);
  out.push_back(make_report(RelationId::resolution, lambda, idx,
                            linalg::operator_norm(sum - res.projections[k]), tolerance));
  return out;
}

RelationReport verify_cross_moment_zero(const LimitProjection& pi, const LimitProjection& pj,
                                        const Matrix& a2, double tolerance) {
  if (pi.branch_index == pj.branch_index) {
    throw std::invalid_argument("cross moment needs two different branches");
  }
  const double r = linalg::operator_norm(pj.matrix * a2 * pi.matrix);
  return make_report(RelationId::cross_moment_zero, pi.lambda, {pj.branch_index, pi.branch_index}, r,
                     tolerance);
}

RelationReport verify_first_moment(const LimitProjection& proj, const Matrix& a2, const Branch& branch,
                                   double tolerance) {
  require_simple(branch, "first moment");
  const Matrix& p = proj.matrix;
  if (is_zero_kind(branch)) {
    const double r = linalg::operator_norm(p * a2 * p - branch.d1 * p);
    return make_report(RelationId::first_moment_zero_case, branch.lambda, {branch.index}, r, tolerance);
  }
  const double r = linalg::operator_norm(p * a2 * p + branch.lambda * branch.d1 * p);
  return make_report(RelationId::first_moment, branch.lambda, {branch.index}, r, tolerance);
}

RelationReport verify_second_moment(const LimitProjection& proj, const Matrix& a2, const TOperator& t,
                                    const Branch& branch, double tolerance) {
  require_simple(branch, "second moment");
  const Matrix& p = proj.matrix;
  const Matrix core = p * a2 * t.matrix * a2 * p;
  if (is_zero_kind(branch)) {
    const double r = linalg::operator_norm(core - 0.5 * branch.d2 * p);
    return make_report(RelationId::second_moment_zero_case, branch.lambda, {branch.index}, r,
                       tolerance);
  }
  const Complex lam = branch.lambda;
  const double r = linalg::operator_norm(lam * core + 0.5 * lam * branch.d2 * p);
  return make_report(RelationId::second_moment, lam, {branch.index}, r, tolerance);
}

std::vector<RelationReport> verify_prime_relations(const std::vector<LimitProjection>& projections,
                                                   const std::vector<Branch>& branches,
                                                   const Matrix& a1, const Matrix& a2,
                                                   double tolerance) {
  if (projections.size() != branches.size()) {
    throw std::invalid_argument("one limit projection per branch expected");
  }
  std::vector<RelationReport> out;
  const auto n = a1.rows();
  const Matrix eye = Matrix::Identity(n, n);
  for (std::size_t j = 0; j < branches.size(); ++j) {
    const Branch& bj = branches[j];
    require_simple(bj, "derivative relations");
    const bool zero = is_zero_kind(bj);
    const Matrix op = zero ? Matrix(a2 - bj.d1 * eye) : Matrix(bj.d1 * a1 + a2);
    const Matrix& pj = projections[j].matrix;
    const Matrix& dj = derivative_of(projections[j]);
    const Complex rhs = zero ? 0.5 * bj.d2 : -0.5 * bj.lambda * bj.d2;
    const RelationId self_id = zero ? RelationId::prime_relation_2 : RelationId::prime_relation_1;
    const RelationId cross_id = zero ? RelationId::prime_relation_4 : RelationId::prime_relation_3;

    out.push_back(make_report(self_id, bj.lambda, {bj.index},
                              linalg::operator_norm(dj * op * pj - rhs * pj), tolerance, "left"));
    out.push_back(make_report(self_id, bj.lambda, {bj.index},
                              linalg::operator_norm(pj * op * dj - rhs * pj), tolerance, "right"));
    for (std::size_t i = 0; i < branches.size(); ++i) {
      if (i == j) continue;
      const Matrix& pi = projections[i].matrix;
      out.push_back(make_report(cross_id, bj.lambda, {bj.index, branches[i].index},
                                linalg::operator_norm(dj * op * pi), tolerance, "left"));
      out.push_back(make_report(cross_id, bj.lambda, {bj.index, branches[i].index},
                                linalg::operator_norm(pi * op * dj), tolerance, "right"));
    }
  }
  return out;
}

std::vector<int> pair_by_derivative(const std::vector<Branch>& x_branches,
                                    const std::vector<Branch>& z_branches, double tol) {
  std::vector<int> pairing;
  for (const auto& xb : x_branches) {
    const Complex target = xb.lambda * xb.d1;
    std::vector<std::pair<double, int>> dist;
    for (const auto& zb : z_branches) dist.emplace_back(std::abs(zb.d1 - target), zb.index);
    std::sort(dist.begin(), dist.end());
    if (dist.empty() || dist.front().first > tol * (1.0 + std::abs(target))) {
      std::ostringstream msg;
      msg << "no z-branch with derivative " << target << " for x-branch " << xb.index;
      throw HypothesisError(msg.str());
    }
    if (dist.size() > 1 && dist[1].first <= tol * (1.0 + std::abs(target))) {
      throw HypothesisError("pairing ambiguity: two z-branches share the derivative lambda x'");
    }
    pairing.push_back(dist.front().second);
  }
  return pairing;
}

RelationReport verify_same_projection_lemma(const std::vector<LimitProjection>& x_limits,
                                            const std::vector<LimitProjection>& z_limits,
                                            const std::vector<int>& pairing, Complex lambda,
                                            double tolerance) {
  if (pairing.size() != x_limits.size()) throw std::invalid_argument("pairing size mismatch");
  double worst = 0.0;
  std::vector<int> idx;
  for (std::size_t j = 0; j < x_limits.size(); ++j) {
    const auto it = std::find_if(z_limits.begin(), z_limits.end(), [&](const LimitProjection& q) {
      return q.branch_index == pairing[j];
    });
    if (it == z_limits.end()) throw std::invalid_argument("paired z-projection missing");
    worst = std::max(worst, linalg::operator_norm(x_limits[j].matrix - it->matrix));
    idx.push_back(x_limits[j].branch_index);
  }
  return make_report(RelationId::same_projection_lemma, lambda, idx, worst, tolerance);
}

Complex square_coefficient(Complex lambda, Complex x_d1, Complex x_d2, Complex z_d2) {
  return (z_d2 + 2.0 * lambda * lambda * lambda * x_d1 * x_d1 - lambda * lambda * x_d2) /
         (2.0 * lambda);
}

RelationReport verify_square_relation(const LimitProjection& proj, const Matrix& a2,
                                      const Branch& x_branch, const Branch& z_branch,
                                      double tolerance) {
  if (is_zero_kind(x_branch)) {
    throw HypothesisError("the square relation is stated for lambda != 0 only");
  }
  require_simple(x_branch, "square relation");
  require_simple(z_branch, "square relation");
  const Complex c = square_coefficient(x_branch.lambda, x_branch.d1, x_branch.d2, z_branch.d2);
  const Matrix& p = proj.matrix;
  const double r = linalg::operator_norm(p * a2 * a2 * p - c * p);
  std::ostringstream variant;
  variant << "coefficient=" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i";
  return make_report(RelationId::square_relation, x_branch.lambda, {x_branch.index}, r, tolerance,
                     variant.str());
}

}  // namespace jointspec
