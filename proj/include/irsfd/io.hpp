#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "irsfd/bench.hpp"
#include "irsfd/mm.hpp"
#include "irsfd/model.hpp"
#include "irsfd/socp.hpp"

namespace irsfd {

using nlohmann::json;

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);

json to_json(const SystemConfig& cfg);
json to_json(const Geometry& geo);
json to_json(const RunTrace& tr, bool include_timing);
json to_json(const SweepResult& res);
json to_json(const ConvexSubproblem& p);

/// Overlays the keys of `j` on `base`. Unknown keys and type mismatches throw
/// ConfigError naming the key. Changing n_users or bandwidth_hz resizes the
/// per-user lists and recomputes noise unless those are given explicitly.
SystemConfig config_from_json(const json& j, SystemConfig base = default_config());
Geometry geometry_from_json(const json& j, Geometry base = {});

/// Sweep document: variable, values, realizations, schemes, seed, and
/// optional "config" and "geometry" objects.
SweepSpec sweep_from_json(const json& j);

ConvexSubproblem subproblem_from_json(const json& j);

/// Parses text, reporting syntax errors with line and column as ConfigError.
json parse_json_text(const std::string& text, const std::string& source);
json read_json_file(const std::string& path);

inline const char* csv_header() { return "scheme,variable,value,seed,wmr_nat,iters,wall_ms"; }
std::string records_to_csv(const std::vector<ExperimentRecord>& records);

}  // namespace irsfd
