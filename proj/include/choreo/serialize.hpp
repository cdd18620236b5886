#pragma once

#include "choreo/analysis.hpp"
#include "choreo/choreography.hpp"
#include "choreo/dynamics.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace choreo {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Malformed or schema-violating input document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Provenance block embedded in every output file.
struct Meta {
  std::uint64_t seed = 0;
  Tolerances tol;
  /// Effective command parameters.
  Json run = Json::object();
};

/// Sorted keys, no whitespace, floats with 17 significant digits, integers
/// verbatim, non-finite floats as null. Parsing the output and dumping it
/// again reproduces it byte for byte.
std::string canonical_dump(const Json& value);
/// Throws ParseError with the parser diagnostics.
Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

Json to_json(const Meta& meta);
Json to_json(const Space& space);
Space space_from_json(const Json& j);
Json to_json(const ForceLaw& force);
ForceLaw force_from_json(const Json& j);
Json to_json(const FourierPath& path);
FourierPath path_from_json(const Json& j);

/// {kind: "choreography_config", path, offsets, masses, space, force,
///  central_mass, flags, meta} plus any extra top-level fields.
Json config_to_json(const ChoreographyConfig& config, const Meta& meta, const Json& extra = Json::object());
/// Validates the schema and the config invariants.
ChoreographyConfig config_from_json(const Json& j);

/// {kind: "trajectory", n, space, dt, t0, masses, force, central_mass,
///  states: [[positions per body], [velocities per body]], meta}.
Json trajectory_to_json(const Trajectory& traj, const Meta& meta);
Trajectory trajectory_from_json(const Json& j);

Json report_to_json(const AnalysisReport& report, const Meta& meta);
/// Header "l,with_f,without_f"; curved reports leave without_f empty.
std::string mode_table_csv(const AnalysisReport& report);

Json residual_to_json(const ResidualStats& stats);

}  // namespace choreo
