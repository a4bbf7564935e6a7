#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "udbound/cone.hpp"
#include "udbound/ensemble.hpp"
#include "udbound/programs.hpp"
#include "udbound/verify.hpp"

namespace udbound::io {

using Json = nlohmann::json;

/// Matrices are nested arrays of [re, im] pairs, row-major.
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& field);

Json to_json(const DimVector& dims);
DimVector dims_from_json(const Json& j, const std::string& field);

Json to_json(const HermitianOperator& op);
HermitianOperator operator_from_json(const Json& j, const DimVector& dims, const std::string& field);

/// { "dims": [...], "states": [ { "prior": p, "matrix": M } ] }
Json to_json(const Ensemble& e);
/// Schema errors name the field; invariant violations embed the validation report.
Ensemble ensemble_from_json(const Json& j);

/// { "dims", "elements": [ { "matrix", "decomposition": [[factor...], ...] } ], "locc_protocol" }
Json to_json(const Measurement& m);
Measurement measurement_from_json(const Json& j);

/// { "dims", "matrix" }
Json certificate_to_json(const HermitianOperator& op, const std::string& kind);
HermitianOperator certificate_from_json(const Json& j);

/// { "dims", "cones": [ { "generators": [ { "matrix", "factors"? } ] } ] }
Json to_json(const DimVector& dims, const std::vector<ConeGenerators>& cones);
std::vector<ConeGenerators> cones_from_json(const Json& j);

Json to_json(const SolveReport& r, const std::string& kind);
Json to_json(const VerificationReport& r, const std::string& kind);

Json read_json(const std::filesystem::path& path);
void write_json(const Json& j, const std::filesystem::path& path);

Ensemble load_ensemble(const std::filesystem::path& path);
void save_ensemble(const Ensemble& e, const std::filesystem::path& path);

}  // namespace udbound::io
