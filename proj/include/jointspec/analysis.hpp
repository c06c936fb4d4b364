#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jointspec/branches.hpp"
#include "jointspec/moments.hpp"
#include "jointspec/riesz.hpp"

namespace jointspec {

struct AnalysisOptions {
  BranchOptions branches;
  QuadratureOptions quadrature;
  double gap_tol = 1e-6;
  double cluster_tol = -1.0;  ///< spectral resolution clustering; <= 0 means 1e-8 ||A_1||
};

/// Everything computed at one eigenvalue of A_1 along the direction x_2 = 1.
struct LambdaAnalysis {
  Complex lambda;
  int multiplicity = 0;  ///< M_lambda
  RegularityReport regularity;
  std::vector<Branch> branches;
  std::vector<LimitProjection> limits;
  std::string failure;  ///< non-empty when branches or projections could not be computed
};

struct PairAnalysis {
  SpectralResolution resolution;
  std::vector<LambdaAnalysis> per_lambda;

  /// a), b) (or their lambda = 0 forms) at every eigenvalue, all projections computed.
  bool regular_everywhere() const;
  /// regular_everywhere() and every branch has multiplicity 1.
  bool simple_everywhere() const;
};

/// Branches, regularity and limit projections at every eigenvalue of A_1 for
/// an n = 2 tuple. Throws NotNormalError when A_1 is not normal.
PairAnalysis analyze_pair(const MatrixTuple& tuple, const AnalysisOptions& options = {});

/// Limit projections of a non-normal pair, used to turn a normality failure
/// into a blow-up diagnostic. Rethrows the BlowUpError if one occurs, else
/// throws NotNormalError.
[[noreturn]] void refuse_non_normal(const MatrixTuple& tuple, const AnalysisOptions& options);

struct VerifyOptions {
  AnalysisOptions analysis;
  double tolerance = 1e-5;
  bool run_anyway = false;     ///< report residuals (unclaimed) even when hypotheses fail
  bool square_and_lemma = true;  ///< also analyze (A_1, A_1 A_2)
};

struct VerificationReport {
  std::vector<RelationReport> relations;
  bool hypotheses_hold = false;      ///< for (A_1, A_2)
  bool z_hypotheses_hold = false;    ///< for (A_1, A_1 A_2)
  std::vector<std::string> notes;

  /// Every claimed relation passes and at least one relation was claimed.
  bool all_pass() const;
};

/// Every projection identity for the pair. The moment identities and the
/// derivative relations require simple branches and regularity at every
/// eigenvalue; without run_anyway a failing hypothesis throws HypothesisError.
/// Non-normal A_1 is refused through refuse_non_normal.
VerificationReport verify_pair(const MatrixTuple& tuple, const VerifyOptions& options = {});

/// (A_1, A_1 A_2).
MatrixTuple product_pair(const MatrixTuple& tuple);

}  // namespace jointspec
