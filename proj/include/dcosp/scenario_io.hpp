#pragma once

// Versioned JSON document for a DcospInstance. Everything needed to replay
// a scenario is stored explicitly (tasks and downlinks included), so a
// loaded scenario does not depend on re-running the geometry.

#include <string>

#include <json.hpp>

#include "dcosp/problem.hpp"

namespace dcosp {

inline constexpr int kScenarioFormatVersion = 1;

nlohmann::json scenario_to_json(const DcospInstance& d);
// Returns a finalized instance. Throws StructuralError on schema mismatch.
DcospInstance scenario_from_json(const nlohmann::json& j);

void save_scenario(const DcospInstance& d, const std::string& path);
DcospInstance load_scenario(const std::string& path);

// Stable text form used for files; identical instances give identical bytes.
std::string dump_json(const nlohmann::json& j);

}  // namespace dcosp
