#pragma once

#include "uasn/harness.hpp"
#include "uasn/model.hpp"
#include "uasn/orns.hpp"
#include "uasn/rnmi.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace uasn {

using json = nlohmann::ordered_json;

inline constexpr int kDeploymentFormat = 1;

// Deployment documents: {"format": 1, "comm_range", "field": {radius, depth},
// "nodes": [{id, kind, position: [x, y, z], residual_energy, primary_energy, generation_rate}]}.
json deployment_to_json(const Deployment& dep);
Deployment deployment_from_json(const json& j);

// Header row of node ids, then one row per source node.
void write_rate_csv(std::ostream& os, const RateArray& rates);
RateArray read_rate_csv(std::istream& is);

json config_to_json(const Config& c);
/// Flat keys; unknown keys are rejected so typos do not pass silently.
Config config_from_json(const json& j);

json placement_record_to_json(const PlacementRecord& rec);
void write_placement_log(std::ostream& os, const std::vector<PlacementRecord>& log);

json selection_report(const SelectionResult& sel);

json metrics_to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const json& j);

void write_lifetime_csv_header(std::ostream& os);
void write_lifetime_csv(std::ostream& os, const MetricsReport& report);
void write_positions_csv(std::ostream& os, const MetricsReport& report);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace uasn
