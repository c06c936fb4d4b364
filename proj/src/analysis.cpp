#include "jointspec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jointspec/errors.hpp"
#include "jointspec/linalg.hpp"

namespace jointspec {

namespace {

Direction unit_direction() {
  Direction d(1);
  d(0) = 1.0;
  return d;
}

bool lambda_ok(const LambdaAnalysis& la) {
  return la.failure.empty() && la.regularity.condition_a && la.regularity.condition_b;
}

std::string describe(const LambdaAnalysis& la) {
  std::ostringstream msg;
  msg << "lambda=" << la.lambda << ": ";
  if (!la.failure.empty()) {
    msg << la.failure;
  } else {
    msg << "condition a) " << (la.regularity.condition_a ? "holds" : "fails") << ", condition b) "
        << (la.regularity.condition_b ? "holds" : "fails");
    if (!la.regularity.note.empty()) msg << " (" << la.regularity.note << ")";
  }
  return msg.str();
}

void mark(std::vector<RelationReport>& out, std::vector<RelationReport> add, bool claimed) {
  for (auto& r : add) {
    r.claimed = claimed;
    out.push_back(std::move(r));
  }
}

}  // namespace

bool PairAnalysis::regular_everywhere() const {
  return std::all_of(per_lambda.begin(), per_lambda.end(), lambda_ok);
}

bool PairAnalysis::simple_everywhere() const {
  if (!regular_everywhere()) return false;
  for (const auto& la : per_lambda)
    for (const auto& b : la.branches)
      if (b.multiplicity != 1) return false;
  return true;
}

MatrixTuple product_pair(const MatrixTuple& tuple) {
  if (tuple.size() != 2) throw DimensionMismatch("product_pair needs n = 2");
  return MatrixTuple({tuple[0], tuple[0] * tuple[1]});
}

PairAnalysis analyze_pair(const MatrixTuple& tuple, const AnalysisOptions& options) {
  if (tuple.size() != 2) throw DimensionMismatch("pair analysis needs n = 2");
  PairAnalysis out;
  out.resolution = spectral_resolution(tuple[0], options.cluster_tol);
  const Direction xhat = unit_direction();
  RegularityOptions reg;
  reg.branches = options.branches;
  reg.gap_tol = options.gap_tol;

  for (std::size_t k = 0; k < out.resolution.eigenvalues.size(); ++k) {
    LambdaAnalysis la;
    la.lambda = out.resolution.eigenvalues[k];
    la.multiplicity = out.resolution.multiplicities[k];
    la.regularity = check_regularity(tuple, la.lambda, xhat, reg);
    try {
      la.branches = local_branches(tuple, la.lambda, xhat, options.branches);
      for (const auto& b : la.branches) la.limits.push_back(limit_projection(tuple, b, options.quadrature));
    } catch (const Error& e) {
      la.failure = e.what();
      la.limits.clear();
    }
    out.per_lambda.push_back(std::move(la));
  }
  return out;
}

void refuse_non_normal(const MatrixTuple& tuple, const AnalysisOptions& options) {
  const auto report = normality(tuple[0]);
  std::vector<Complex> seen;
  const double tol = 1e-6 * std::max(1.0, linalg::operator_norm(tuple[0]));
  for (Complex mu : linalg::eigenvalues(tuple[0])) {
    if (std::any_of(seen.begin(), seen.end(), [&](Complex s) { return std::abs(s - mu) <= tol; })) continue;
    seen.push_back(mu);
  }
  const Direction xhat = unit_direction();
  for (Complex mu : seen) {
    try {
      for (const auto& b : local_branches(tuple, mu, xhat, options.branches)) {
        limit_projection(tuple, b, options.quadrature);
      }
    } catch (const BlowUpError&) {
      throw;
    } catch (const Error&) {
      // A failure other than blow-up still ends in the normality refusal below.
    }
  }
  std::ostringstream msg;
  msg << "A1 is not normal (||A1 A1* - A1* A1|| = " << report.commutator_norm
      << "); refusing to verify projection identities";
  throw NotNormalError(msg.str());
}

bool VerificationReport::all_pass() const {
  bool any = false;
  for (const auto& r : relations) {
    if (!r.claimed) continue;
    any = true;
    if (!r.pass) return false;
  }
  return any;
}

VerificationReport verify_pair(const MatrixTuple& tuple, const VerifyOptions& options) {
  if (tuple.size() != 2) throw DimensionMismatch("verify needs a pair (n = 2)");
  if (!normality(tuple[0]).is_normal) refuse_non_normal(tuple, options.analysis);

  VerificationReport report;
  const double tol = options.tolerance;
  const auto xa = analyze_pair(tuple, options.analysis);
  report.hypotheses_hold = xa.simple_everywhere();
  if (!report.hypotheses_hold) {
    for (const auto& la : xa.per_lambda)
      if (!lambda_ok(la)) report.notes.push_back(describe(la));
    if (!options.run_anyway) {
      std::string msg = "hypotheses of the moment identities fail";
      if (!report.notes.empty()) msg += ": " + report.notes.front();
      throw HypothesisError(msg);
    }
  }

  const Matrix& a1 = tuple[0];
  const Matrix& a2 = tuple[1];
  for (const auto& la : xa.per_lambda) {
    if (!la.failure.empty()) continue;
    const bool here = lambda_ok(la);
    mark(report.relations, verify_orthogonality_and_resolution(la.limits, xa.resolution, la.lambda, tol),
         here);
    for (std::size_t i = 0; i < la.limits.size(); ++i)
      for (std::size_t j = 0; j < la.limits.size(); ++j)
        if (i != j) mark(report.relations, {verify_cross_moment_zero(la.limits[i], la.limits[j], a2, tol)}, here);

    const bool simple = std::all_of(la.branches.begin(), la.branches.end(),
                                    [](const Branch& b) { return b.multiplicity == 1; });
    if (!simple) {
      report.notes.push_back(describe(la) + "; moment identities skipped (multiplicity > 1)");
      continue;
    }
    const auto t = t_operator(xa.resolution, la.lambda);
    for (std::size_t j = 0; j < la.branches.size(); ++j) {
      mark(report.relations, {verify_first_moment(la.limits[j], a2, la.branches[j], tol)},
           report.hypotheses_hold);
      mark(report.relations, {verify_second_moment(la.limits[j], a2, t, la.branches[j], tol)},
           report.hypotheses_hold);
    }
    mark(report.relations, verify_prime_relations(la.limits, la.branches, a1, a2, tol), here);
  }

  if (!options.square_and_lemma) return report;

  const auto za = analyze_pair(product_pair(tuple), options.analysis);
  report.z_hypotheses_hold = za.simple_everywhere();
  if (!report.z_hypotheses_hold) {
    for (const auto& la : za.per_lambda)
      if (!lambda_ok(la)) report.notes.push_back("(A1, A1 A2) " + describe(la));
    if (!options.run_anyway) {
      report.notes.push_back("same-projection and square relations skipped: (A1, A1 A2) hypotheses fail");
      return report;
    }
  }
  const bool claim = report.hypotheses_hold && report.z_hypotheses_hold;
  for (std::size_t k = 0; k < xa.per_lambda.size() && k < za.per_lambda.size(); ++k) {
    const auto& lx = xa.per_lambda[k];
    const auto& lz = za.per_lambda[k];
    if (lx.branches.empty() || lx.branches.front().kind == BranchKind::zero_lambda) continue;
    if (!lx.failure.empty() || !lz.failure.empty()) continue;
    const auto single = [](const Branch& b) { return b.multiplicity == 1; };
    if (!std::all_of(lx.branches.begin(), lx.branches.end(), single) ||
        !std::all_of(lz.branches.begin(), lz.branches.end(), single)) {
      continue;
    }
    std::vector<int> pairing;
    try {
      pairing = pair_by_derivative(lx.branches, lz.branches);
    } catch (const HypothesisError& e) {
      std::ostringstream msg;
      msg << "lambda=" << lx.lambda << ": " << e.what();
      report.notes.push_back(msg.str());
      continue;
    }
    mark(report.relations,
         {verify_same_projection_lemma(lx.limits, lz.limits, pairing, lx.lambda, tol)}, claim);
    for (std::size_t j = 0; j < lx.branches.size(); ++j) {
      const auto& zb = lz.branches[static_cast<std::size_t>(pairing[j])];
      mark(report.relations, {verify_square_relation(lx.limits[j], a2, lx.branches[j], zb, tol)}, claim);
    }
  }
  return report;
}

}  // namespace jointspec
