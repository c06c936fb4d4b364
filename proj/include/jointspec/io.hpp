#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "jointspec/analysis.hpp"
#include "jointspec/coxeter.hpp"
#include "jointspec/pencil.hpp"
#include "jointspec/riesz.hpp"

namespace jointspec::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Non-finite values become null.
Json number(double v);
Json complex_json(Complex z);
Json matrix_json(const Matrix& m);
Json vector_json(const Vector& v);

/// Entries may be [re, im] pairs or plain reals. Throws ParseError.
Matrix parse_matrix(const Json& j);

/// {"schema_version", "n", "N", "matrices": [...]}; n and N are optional on
/// input but must agree with the matrices when present. Throws ParseError.
MatrixTuple parse_tuple(const Json& j);
Json tuple_json(const MatrixTuple& tuple);

/// Reads and parses a JSON file. Throws ParseError.
Json read_json_file(const std::string& path);

/// Coxeter configuration:
///   {"schema_version", "coxeter_matrix": [[1,3],[3,1]],
///    "summands": [{"kind": "dihedral", "irrep": "two_dim", "angle": 2.094...},
///                 {"kind": "geometric"}, {"kind": "sign"}, {"kind": "trivial"}],
///    "rep_seed": optional Haar seed for rho,
///    and either "tuple": {...} or "planted": {"seed": s, "block_size": 2,
///    "b1_eigenvalue": optional}}.
struct CoxeterConfig {
  CoxeterRep rep;
  MatrixTuple tuple;
};
CoxeterConfig parse_coxeter_config(const Json& j);
Json coxeter_matrix_json(const CoxeterMatrix& cm);
/// Coxeter matrix, summands and generators.
Json to_json(const CoxeterRep& rep);

Json to_json(const Branch& b);
Json to_json(const RegularityReport& r);
Json to_json(const LimitProjection& p);
Json to_json(const NormProfile& p);
Json to_json(const RelationReport& r);
Json to_json(const PairAnalysis& a);
Json to_json(const VerificationReport& r);
Json to_json(const RigidityReport& r);

}  // namespace jointspec::io
