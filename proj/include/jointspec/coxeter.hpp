#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "jointspec/pencil.hpp"
#include "jointspec/types.hpp"

namespace jointspec {

/// Symmetric Coxeter matrix; entry 0 stands for infinity. Indices are zero-based.
class CoxeterMatrix {
 public:
  explicit CoxeterMatrix(std::vector<std::vector<int>> m);

  static CoxeterMatrix dihedral(int m);
  /// Path graph with all labels 3 (symmetric group S_{n+1}).
  static CoxeterMatrix type_a(int n);

  int size() const noexcept { return static_cast<int>(m_.size()); }
  int at(int i, int j) const { return m_.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j)); }
  const std::vector<std::vector<int>>& entries() const noexcept { return m_; }

 private:
  std::vector<std::vector<int>> m_;
};

struct GroupType {
  std::string name;       ///< e.g. "A3", "B4", "D5", "I2(5)", "I2(inf)", or "other"
  bool finite = false;
  bool non_special = false;  ///< finite and every irreducible part is dihedral, A, B or D
};

GroupType classify(const CoxeterMatrix& cm);

enum class IrrepKind { one_dim_pp, one_dim_mm, one_dim_pm, one_dim_mp, two_dim };

std::string to_string(IrrepKind kind);

/// Irreducible unitary representation of a dihedral group in canonical form:
/// (diag(1,-1), [[cos a, sin a], [sin a, -cos a]]) for two_dim, signs otherwise.
struct DihedralIrrep {
  IrrepKind kind = IrrepKind::two_dim;
  double angle = 0.0;  ///< alpha in (0, pi), two_dim only

  int dimension() const { return kind == IrrepKind::two_dim ? 2 : 1; }
  std::pair<Matrix, Matrix> generators() const;
  /// Order of rho(g_1) rho(g_2): 1 for pp/mm, 2 for pm/mp, 2 pi / alpha reduced for two_dim
  /// (0 when alpha / 2 pi is not a fraction with denominator <= cap).
  int product_order(int cap = 1000) const;
};

enum class SummandKind { dihedral, trivial, sign, geometric };

struct Summand {
  SummandKind kind = SummandKind::trivial;
  DihedralIrrep irrep;  ///< used when kind == dihedral
};

struct CoxeterRep {
  CoxeterMatrix cm;
  std::vector<Summand> summands;
  std::vector<Matrix> generators;
  std::optional<std::uint64_t> seed;  ///< Haar conjugation seed, if any

  int dim() const { return static_cast<int>(generators.front().rows()); }
  MatrixTuple tuple() const { return MatrixTuple(generators); }
};

/// Direct sum of the summands, optionally conjugated by a seeded Haar unitary.
/// Dihedral summands require n = 2; geometric requires a positive definite
/// cosine form (finite type). Throws InconsistentAssignment when a summand is
/// not a representation of the group given by cm.
CoxeterRep build_representation(const CoxeterMatrix& cm, const std::vector<Summand>& summands,
                                std::optional<std::uint64_t> seed = std::nullopt);

enum class ComponentShape { line, ellipse, gen_line, gen_ellipse_z };

/// One component of a dihedral irrep's proper joint spectrum:
///   line:          c1 x1 + c2 x2 = 1
///   ellipse:       x1^2 + 2 cos(a) x1 x2 + x2^2 = 1
///   gen_line:      c1 z1 + c2 z2 = 1              (pair rho(g1), rho(g1) rho(g2))
///   gen_ellipse_z: z1^2 - z2^2 + 2 cos(a) z2 = 1   (same)
struct SpectrumComponentDescriptor {
  ComponentShape shape = ComponentShape::line;
  int c1 = 1, c2 = 1;
  double cos_alpha = 0.0;

  /// The defining polynomial minus 1.
  Complex evaluate(Complex x1, Complex x2) const;
  /// Points on the component with |x2| <= radius, from its parametrization.
  std::vector<PencilPoint> sample(std::mt19937_64& rng, int count, double radius = 1.5) const;
};

std::string to_string(ComponentShape shape);

/// Descriptors for (rho(g1), rho(g2)) and for (rho(g1), rho(g1) rho(g2)).
std::pair<SpectrumComponentDescriptor, SpectrumComponentDescriptor> dihedral_component_catalog(
    const DihedralIrrep& irrep);

/// Irreducible constituents of the restriction to <g_1, g_i>.
struct PairDecomposition {
  int i = 1;  ///< zero-based index of the second generator
  std::vector<std::pair<DihedralIrrep, int>> constituents;  ///< irrep, multiplicity
  bool multiplicity_free = true;
};

/// Condition (*): block-splits rho(g_1), rho(g_i) through the eigenspaces of
/// the product rho(g_1) rho(g_i). One entry per i = 2..n. Throws EigensolverError
/// if the split is numerically inconsistent.
std::vector<PairDecomposition> check_condition_star(const CoxeterRep& rep, double angle_tol = 1e-8);

struct InclusionResult {
  bool holds = true;
  int sampled = 0;
  double worst_distance = 0.0;  ///< largest relative sigma_min seen
  std::optional<PencilPoint> witness;
  std::uint64_t seed = 0;
};

/// Condition (I): points of sigma_p(rho) on random complex lines must lie in
/// sigma_p(A) at relative tolerance `tol`.
InclusionResult check_condition_I(const MatrixTuple& a, const CoxeterRep& rep, int sample_count = 64,
                                  std::uint64_t seed = 1, double tol = 1e-8);

/// Sampled inclusion sigma_p(from) in sigma_p(into) (same n).
InclusionResult sampled_inclusion(const MatrixTuple& from, const MatrixTuple& into, int sample_count,
                                  std::uint64_t seed, double tol = 1e-8);

/// (A_1, ..., A_n, A_1 A_2, ..., A_1 A_n).
MatrixTuple extended_tuple(const MatrixTuple& a);

struct LocalMatchResult {
  int coordinate = 0;  ///< zero-based j
  int sign = 1;
  bool holds = true;
  int sampled_a = 0, sampled_rho = 0;
  double worst_distance = 0.0;
  std::optional<PencilPoint> witness;
  std::string witness_side;  ///< "A" (point of A not in rho) or "rho"
};

/// Condition (II): two-sided sampled equality of the extended spectra inside
/// the epsilon-ball around each zeta_j^{+-}, j = 1..n.
std::vector<LocalMatchResult> check_condition_II(const MatrixTuple& a, const CoxeterRep& rep,
                                                 double epsilon = 0.15, int sample_count = 24,
                                                 std::uint64_t seed = 1, double tol = 1e-8);

struct InvariantSubspace {
  Matrix basis;  ///< orthonormal columns
  int dim = 0;
  std::vector<double> invariance_residuals;  ///< ||(I - Pi) A_j Pi|| per j
  std::vector<Matrix> restricted;            ///< basis* A_j basis
};

/// L = span of the +-1 eigenvectors of (normal) A_1. Throws EmptySubspaceError.
InvariantSubspace extract_invariant_subspace(const MatrixTuple& a, double tol = 1e-7);

struct CoxeterResidual {
  int i = 0, j = 0, m = 0;
  double residual = 0.0;
};

struct ExponentRecovery {
  int i = 0, j = 0;
  int expected = 0;   ///< m_ij, 0 = infinity
  int recovered = 0;  ///< 0 when no finite order was found below the cap
  bool ambiguous = false;
  std::vector<double> cosines;  ///< cos(alpha) read off the joint spectrum on x_i = x_j
};

/// Orders of rotations with the given cosines; exposed for tests.
ExponentRecovery recover_exponent(const Matrix& ai, const Matrix& aj, int cap = 60,
                                  double tol = 1e-7);

struct RestrictionCheck {
  std::vector<double> unitary_residuals;
  std::vector<double> selfadjoint_residuals;
  std::vector<CoxeterResidual> coxeter_residuals;
  InclusionResult restricted_in_rho, rho_in_restricted;
  bool spectra_match = false;
  std::vector<ExponentRecovery> exponents;
  bool exponents_match = false;
  double max_residual = 0.0;
};

/// Conclusion 2): the restrictions form a unitary, self-adjoint Coxeter
/// representation with the same joint spectrum and the same exponents.
RestrictionCheck verify_restriction(const std::vector<Matrix>& restricted, const CoxeterRep& rep,
                                    int sample_count = 48, std::uint64_t seed = 1, double tol = 1e-8);

struct EquivalenceEvidence {
  int word_length_cap = 8;
  int words = 0;
  double max_discrepancy = 0.0;
  std::vector<int> worst_word;  ///< zero-based generator indices
};

/// Traces of all reduced generator words up to the cap, compared between
/// the two tuples (character comparison, no intertwiner).
EquivalenceEvidence equivalence_evidence(const std::vector<Matrix>& restricted,
                                         const std::vector<Matrix>& rho, int word_length_cap = 8);

struct PairRegularity {
  int i = 1;            ///< zero-based second index
  bool product = false;  ///< pair (A_1, A_1 A_i) rather than (A_1, A_i)
  Complex lambda;
  bool condition_a = false, condition_b = false;
};

struct RigidityOptions {
  double epsilon = 0.15;
  int samples_I = 64;
  int samples_II = 24;
  int samples_restriction = 48;
  std::uint64_t seed = 1;
  int word_length_cap = 8;
  double membership_tol = 1e-8;
  double residual_tol = 1e-7;
  double character_tol = 1e-6;
  bool check_pair_regularity = true;
};

struct RigidityReport {
  std::vector<PairDecomposition> star;
  bool condition_star = false;
  InclusionResult condition_I;
  std::vector<LocalMatchResult> condition_II;
  bool condition_II_all = false;

  bool a1_normal = false;
  std::vector<double> generator_norms;  ///< ||A_j||, j = 2..n
  bool norms_ok = false;
  std::vector<PairRegularity> regularity;
  bool hypotheses_regular = false;
  GroupType group;

  std::optional<InvariantSubspace> subspace;
  int dim_L = 0;
  double max_invariance_residual = 0.0;
  std::optional<RestrictionCheck> restriction;
  std::optional<EquivalenceEvidence> equivalence;

  bool conclusion_1 = false, conclusion_2 = false, conclusion_3 = false;
  std::vector<std::string> notes;

  bool conditions_hold() const { return condition_star && condition_I.holds && condition_II_all; }
};

/// The full pipeline: hypotheses, conditions (*), (I), (II), the subspace L
/// and conclusions 1)-3). Proceeds past failing conditions and reports them.
RigidityReport rigidity_check(const MatrixTuple& a, const CoxeterRep& rep,
                              const RigidityOptions& options = {});

/// U (rho(g_i) + B_i) U^* with a seeded Haar unitary U.
MatrixTuple planted_tuple(const CoxeterRep& rep, const std::vector<Matrix>& blocks, std::uint64_t seed);

}  // namespace jointspec
