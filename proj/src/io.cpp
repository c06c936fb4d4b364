#include "jointspec/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "jointspec/errors.hpp"
#include "jointspec/fixtures.hpp"

namespace jointspec::io {

namespace {

Complex parse_entry(const Json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  throw ParseError("matrix entry must be a number or a [re, im] pair");
}

int require_int(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw ParseError(std::string("missing or non-integer field \"") + key + "\"");
  }
  return j[key].get<int>();
}

void check_schema(const Json& j) {
  if (j.contains("schema_version") && (!j["schema_version"].is_number_integer() ||
                                       j["schema_version"].get<int>() > kSchemaVersion)) {
    throw ParseError("unsupported schema_version");
  }
}

IrrepKind parse_irrep_kind(const std::string& s) {
  for (auto k : {IrrepKind::one_dim_pp, IrrepKind::one_dim_mm, IrrepKind::one_dim_pm, IrrepKind::one_dim_mp,
                 IrrepKind::two_dim}) {
    if (to_string(k) == s) return k;
  }
  throw ParseError("unknown irrep \"" + s + "\"");
}

Summand parse_summand(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ParseError("summand must be an object with a string \"kind\"");
  }
  const auto kind = j["kind"].get<std::string>();
  if (kind == "trivial") return {SummandKind::trivial, {}};
  if (kind == "sign") return {SummandKind::sign, {}};
  if (kind == "geometric") return {SummandKind::geometric, {}};
  if (kind != "dihedral") throw ParseError("unknown summand kind \"" + kind + "\"");
  if (!j.contains("irrep") || !j["irrep"].is_string()) throw ParseError("dihedral summand needs \"irrep\"");
  DihedralIrrep irrep{parse_irrep_kind(j["irrep"].get<std::string>()), 0.0};
  if (irrep.kind == IrrepKind::two_dim) {
    if (!j.contains("angle") || !j["angle"].is_number()) throw ParseError("two_dim irrep needs \"angle\"");
    irrep.angle = j["angle"].get<double>();
  }
  return {SummandKind::dihedral, irrep};
}

Json summand_json(const Summand& s) {
  switch (s.kind) {
    case SummandKind::trivial: return {{"kind", "trivial"}};
    case SummandKind::sign: return {{"kind", "sign"}};
    case SummandKind::geometric: return {{"kind", "geometric"}};
    case SummandKind::dihedral: break;
  }
  Json j{{"kind", "dihedral"}, {"irrep", to_string(s.irrep.kind)}};
  if (s.irrep.kind == IrrepKind::two_dim) j["angle"] = s.irrep.angle;
  return j;
}

Json irrep_json(const DihedralIrrep& irrep) {
  Json j{{"irrep", to_string(irrep.kind)}};
  if (irrep.kind == IrrepKind::two_dim) j["angle"] = irrep.angle;
  return j;
}

Json optional_point(const std::optional<PencilPoint>& p) { return p ? vector_json(*p) : Json(nullptr); }

Json inclusion_json(const InclusionResult& r) {
  return {{"holds", r.holds},
          {"sampled", r.sampled},
          {"worst_distance", number(r.worst_distance)},
          {"witness", optional_point(r.witness)},
          {"seed", r.seed}};
}

const char* kind_name(BranchKind k) { return k == BranchKind::zero_lambda ? "zero_lambda" : "nonzero_lambda"; }

}  // namespace

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json complex_json(Complex z) { return Json::array({number(z.real()), number(z.imag())}); }

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_json(v(k)));
  return out;
}

Matrix parse_matrix(const Json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix must be a nonempty array of rows");
  const auto rows = j.size();
  if (!j[0].is_array()) throw ParseError("matrix rows must be arrays");
  const auto cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ParseError("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_entry(j[r][c]);
    }
  }
  return m;
}

MatrixTuple parse_tuple(const Json& j) {
  if (!j.is_object()) throw ParseError("tuple must be a JSON object");
  check_schema(j);
  if (!j.contains("matrices") || !j["matrices"].is_array() || j["matrices"].empty()) {
    throw ParseError("tuple needs a nonempty \"matrices\" array");
  }
  std::vector<Matrix> ms;
  for (const auto& m : j["matrices"]) ms.push_back(parse_matrix(m));
  if (j.contains("n") && require_int(j, "n") != static_cast<int>(ms.size())) {
    throw ParseError("\"n\" disagrees with the number of matrices");
  }
  for (const auto& m : ms) {
    if (m.rows() != m.cols()) throw ParseError("matrices must be square");
    if (m.rows() != ms.front().rows()) throw ParseError("matrices must share one size");
  }
  if (j.contains("N") && require_int(j, "N") != static_cast<int>(ms.front().rows())) {
    throw ParseError("\"N\" disagrees with the matrix size");
  }
  return MatrixTuple(std::move(ms));
}

Json tuple_json(const MatrixTuple& tuple) {
  Json ms = Json::array();
  for (const auto& m : tuple.matrices()) ms.push_back(matrix_json(m));
  return {{"schema_version", kSchemaVersion}, {"n", tuple.size()}, {"N", tuple.dim()}, {"matrices", ms}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

CoxeterConfig parse_coxeter_config(const Json& j) {
  if (!j.is_object()) throw ParseError("Coxeter configuration must be a JSON object");
  check_schema(j);
  if (!j.contains("coxeter_matrix") || !j["coxeter_matrix"].is_array()) {
    throw ParseError("missing \"coxeter_matrix\"");
  }
  std::vector<std::vector<int>> entries;
  for (const auto& row : j["coxeter_matrix"]) {
    if (!row.is_array()) throw ParseError("coxeter_matrix rows must be arrays");
    std::vector<int> r;
    for (const auto& e : row) {
      if (!e.is_number_integer()) throw ParseError("coxeter_matrix entries must be integers (0 = infinity)");
      r.push_back(e.get<int>());
    }
    entries.push_back(std::move(r));
  }
  if (!j.contains("summands") || !j["summands"].is_array()) throw ParseError("missing \"summands\"");
  std::vector<Summand> summands;
  for (const auto& s : j["summands"]) summands.push_back(parse_summand(s));
  std::optional<std::uint64_t> rep_seed;
  if (j.contains("rep_seed")) {
    if (!j["rep_seed"].is_number_unsigned()) throw ParseError("\"rep_seed\" must be a nonnegative integer");
    rep_seed = j["rep_seed"].get<std::uint64_t>();
  }

  // Malformed Coxeter data is an input error; inconsistent summands are not.
  std::optional<CoxeterMatrix> cm;
  try {
    cm.emplace(std::move(entries));
  } catch (const InconsistentAssignment& e) {
    throw ParseError(e.what());
  }
  CoxeterRep rep = build_representation(*cm, summands, rep_seed);

  if (j.contains("tuple")) return {rep, parse_tuple(j["tuple"])};
  if (!j.contains("planted") || !j["planted"].is_object()) {
    throw ParseError("configuration needs \"tuple\" or \"planted\"");
  }
  const auto& p = j["planted"];
  const std::uint64_t seed = p.value("seed", std::uint64_t{1});
  const int block_size = p.value("block_size", 2);
  if (block_size < 1) throw ParseError("\"block_size\" must be positive");
  std::optional<double> b1;
  if (p.contains("b1_eigenvalue")) b1 = p["b1_eigenvalue"].get<double>();
  const auto blocks = fixtures::avoiding_blocks(cm->size(), block_size, seed, b1);
  MatrixTuple tuple = planted_tuple(rep, blocks, seed + 1000);
  return {std::move(rep), std::move(tuple)};
}

Json coxeter_matrix_json(const CoxeterMatrix& cm) { return cm.entries(); }

Json to_json(const CoxeterRep& rep) {
  Json summands = Json::array(), gens = Json::array();
  for (const auto& s : rep.summands) summands.push_back(summand_json(s));
  for (const auto& g : rep.generators) gens.push_back(matrix_json(g));
  return {{"coxeter_matrix", coxeter_matrix_json(rep.cm)},
          {"summands", summands},
          {"rep_seed", rep.seed ? Json(*rep.seed) : Json(nullptr)},
          {"generators", gens}};
}

Json to_json(const Branch& b) {
  Json samples = Json::array(), residuals = Json::array();
  for (const auto& s : b.samples) {
    samples.push_back({{"t", s.t}, {"value", complex_json(s.value)}});
    residuals.push_back(number(s.residual));
  }
  return {{"lambda", complex_json(b.lambda)},
          {"j", b.index},
          {"kind", kind_name(b.kind)},
          {"direction", vector_json(b.direction)},
          {"d1", complex_json(b.d1)},
          {"d2", complex_json(b.d2)},
          {"d1_error", number(b.d1_error)},
          {"d2_error", number(b.d2_error)},
          {"multiplicity", b.multiplicity},
          {"samples", samples},
          {"residuals", residuals}};
}

Json to_json(const RegularityReport& r) {
  return {{"lambda", complex_json(r.lambda)},
          {"condition_a", r.condition_a},
          {"condition_b", r.condition_b},
          {"branch_derivative_gaps", number(r.branch_derivative_gaps)},
          {"tangency_margin", number(r.tangency_margin)},
          {"branch_count", r.branch_count},
          {"total_multiplicity", r.total_multiplicity},
          {"note", r.note}};
}

Json to_json(const LimitProjection& p) {
  Json ladder = Json::array();
  for (const auto& c : p.ladder) {
    ladder.push_back({{"t", c.t},
                      {"value", complex_json(c.value)},
                      {"radius", number(c.contour.radius)},
                      {"quad_points", c.quad_points},
                      {"rank", c.rank}});
  }
  Json j{{"j", p.branch_index},
         {"lambda", complex_json(p.lambda)},
         {"direction", vector_json(p.direction)},
         {"P", matrix_json(p.matrix)},
         {"idempotency", number(p.idempotency_residual)},
         {"rank", p.rank},
         {"extrapolation_error", number(p.extrapolation_error)},
         {"ladder", ladder}};
  if (p.derivative) {
    j["P_prime"] = matrix_json(*p.derivative);
    j["P_prime_error"] = number(p.derivative_error);
  }
  if (p.second_derivative) {
    j["P_second"] = matrix_json(*p.second_derivative);
    j["P_second_error"] = number(p.second_derivative_error);
  }
  return j;
}

Json to_json(const NormProfile& p) {
  Json pts = Json::array();
  for (const auto& [t, nrm] : p.points) pts.push_back({{"t", t}, {"norm", number(nrm)}});
  return {{"points", pts}, {"exponent", number(p.exponent)}};
}

Json to_json(const RelationReport& r) {
  return {{"relation", to_string(r.id)},
          {"lambda", complex_json(r.lambda)},
          {"branches", r.branches},
          {"residual", number(r.residual)},
          {"tolerance", r.tolerance},
          {"pass", r.pass},
          {"claimed", r.claimed},
          {"variant", r.variant}};
}

Json to_json(const PairAnalysis& a) {
  Json per = Json::array();
  for (const auto& la : a.per_lambda) {
    Json branches = Json::array(), limits = Json::array();
    for (const auto& b : la.branches) branches.push_back(to_json(b));
    for (const auto& p : la.limits) limits.push_back(to_json(p));
    per.push_back({{"lambda", complex_json(la.lambda)},
                   {"multiplicity", la.multiplicity},
                   {"regularity", to_json(la.regularity)},
                   {"branches", branches},
                   {"projections", limits},
                   {"failure", la.failure.empty() ? Json(nullptr) : Json(la.failure)}});
  }
  return {{"per_lambda", per},
          {"regular_everywhere", a.regular_everywhere()},
          {"simple_everywhere", a.simple_everywhere()}};
}

Json to_json(const VerificationReport& r) {
  Json rel = Json::array();
  double worst = 0.0;
  for (const auto& x : r.relations) {
    rel.push_back(to_json(x));
    if (x.claimed) worst = std::max(worst, x.residual);
  }
  return {{"relations", rel},
          {"hypotheses_hold", r.hypotheses_hold},
          {"z_hypotheses_hold", r.z_hypotheses_hold},
          {"max_claimed_residual", number(worst)},
          {"all_pass", r.all_pass()},
          {"notes", r.notes}};
}

Json to_json(const RigidityReport& r) {
  Json star = Json::array();
  for (const auto& pd : r.star) {
    Json cons = Json::array();
    for (const auto& [irrep, mult] : pd.constituents) {
      Json c = irrep_json(irrep);
      c["multiplicity"] = mult;
      cons.push_back(std::move(c));
    }
    star.push_back({{"pair", {1, pd.i + 1}}, {"constituents", cons}, {"multiplicity_free", pd.multiplicity_free}});
  }
  Json cond2 = Json::array();
  for (const auto& m : r.condition_II) {
    cond2.push_back({{"coordinate", m.coordinate + 1},
                     {"sign", m.sign},
                     {"holds", m.holds},
                     {"sampled_a", m.sampled_a},
                     {"sampled_rho", m.sampled_rho},
                     {"worst_distance", number(m.worst_distance)},
                     {"witness", optional_point(m.witness)},
                     {"witness_side", m.witness_side}});
  }
  Json reg = Json::array();
  for (const auto& p : r.regularity) {
    reg.push_back({{"pair", p.product ? "A1, A1 A" + std::to_string(p.i + 1) : "A1, A" + std::to_string(p.i + 1)},
                   {"lambda", complex_json(p.lambda)},
                   {"condition_a", p.condition_a},
                   {"condition_b", p.condition_b}});
  }
  Json j{{"group", {{"name", r.group.name}, {"finite", r.group.finite}, {"non_special", r.group.non_special}}},
         {"condition_star", {{"holds", r.condition_star}, {"pairs", star}}},
         {"condition_I", inclusion_json(r.condition_I)},
         {"condition_II", {{"holds", r.condition_II_all}, {"points", cond2}}},
         {"hypotheses",
          {{"a1_normal", r.a1_normal},
           {"generator_norms", r.generator_norms},
           {"norms_ok", r.norms_ok},
           {"regularity", reg},
           {"regular", r.hypotheses_regular}}},
         {"dim_L", r.dim_L},
         {"max_invariance_residual", number(r.max_invariance_residual)},
         {"conclusion_1", r.conclusion_1},
         {"conclusion_2", r.conclusion_2},
         {"conclusion_3", r.conclusion_3},
         {"notes", r.notes}};
  if (r.subspace) {
    Json inv = Json::array();
    for (double v : r.subspace->invariance_residuals) inv.push_back(number(v));
    j["invariance_residuals"] = inv;
  }
  if (r.restriction) {
    const auto& x = *r.restriction;
    Json cox = Json::array(), exps = Json::array(), unit = Json::array(), sa = Json::array();
    for (const auto& c : x.coxeter_residuals) {
      cox.push_back({{"i", c.i + 1}, {"j", c.j + 1}, {"m", c.m}, {"residual", number(c.residual)}});
    }
    for (const auto& e : x.exponents) {
      Json cs = Json::array();
      for (double c : e.cosines) cs.push_back(number(c));
      exps.push_back({{"i", e.i + 1},
                      {"j", e.j + 1},
                      {"expected", e.expected},
                      {"recovered", e.recovered},
                      {"ambiguous", e.ambiguous},
                      {"cosines", cs}});
    }
    for (double v : x.unitary_residuals) unit.push_back(number(v));
    for (double v : x.selfadjoint_residuals) sa.push_back(number(v));
    j["restriction"] = {{"unitary_residuals", unit},
                        {"selfadjoint_residuals", sa},
                        {"coxeter_residuals", cox},
                        {"restricted_in_rho", inclusion_json(x.restricted_in_rho)},
                        {"rho_in_restricted", inclusion_json(x.rho_in_restricted)},
                        {"spectra_match", x.spectra_match},
                        {"exponents", exps},
                        {"exponents_match", x.exponents_match},
                        {"max_residual", number(x.max_residual)}};
  }
  if (r.equivalence) {
    const auto& e = *r.equivalence;
    Json word = Json::array();
    for (int g : e.worst_word) word.push_back(g + 1);
    j["equivalence"] = {{"word_length_cap", e.word_length_cap},
                        {"words", e.words},
                        {"max_discrepancy", number(e.max_discrepancy)},
                        {"worst_word", word}};
  }
  return j;
}

}  // namespace jointspec::io
