#pragma once

#include <string>

#include <json.hpp>

#include "relaydp/dp.hpp"
#include "relaydp/eval.hpp"

namespace relaydp {

// Versioned little-endian binary policy/value file.  Header: magic
// "RDPV", u32 version, solver configuration (slots, rate, step, grid
// sizes, seed, channel), then the averaged continuation tables.
// Scenario sets are not stored; they regenerate from (channel, seed).
void save_table(const ValueTable& table, const std::string& path);
ValueTable load_table(const std::string& path);

nlohmann::json dist_to_json(const DistributionSpec& d);
DistributionSpec dist_from_json(const nlohmann::json& j);

nlohmann::json channel_to_json(const ChannelModel& c);
nlohmann::json solver_config_to_json(const SolverConfig& c);

// JSON mirror of the value file for inspection; tables are large, so
// they are optional.
nlohmann::json table_to_json(const ValueTable& table, bool include_tables);

} // namespace relaydp
