#pragma once

#include "nonstat/changepoint.hpp"
#include "nonstat/dispatch.hpp"
#include "nonstat/var_model.hpp"

#include <json.hpp>

#include <string>

namespace nonstat {

struct SimulationBundle;

using Json = nlohmann::ordered_json;

/// {change_points, alpha, window, statistics, threshold, seed, n_boot, bootstrap_block}
Json to_json(const ChangePointResult& result);

/// {order, coefficients: [[row, ...] per lag], intercept, mean, segment_length, innovations: [[...] per row]}
Json to_json(const VarModel& model);
VarModel var_model_from_json(const Json& j);

/// {buses:[{id,V}], lines:[{from,to,X,fmin,fmax}], generators:[{bus,a,b,gmin,gmax,ramp_dn,ramp_up,wind}],
///  loads:[{bus,beta,demand}]}. Missing or null bounds are unbounded.
NetworkCase case_from_json(const Json& j);
Json to_json(const NetworkCase& network);
NetworkCase load_case_file(const std::string& path);

/// Run description for a simulation directory: segments with methods, seeds and the full configuration.
Json manifest_json(const SimulationBundle& bundle);

Json read_json_file(const std::string& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::string& path, const Json& j);

}  // namespace nonstat
