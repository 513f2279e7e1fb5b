#ifndef FAIRCEPTRON_POOL_IO_H_
#define FAIRCEPTRON_POOL_IO_H_

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fairceptron/generator.h"

namespace fairceptron {

nlohmann::json RosterToJson(const Roster& roster);
Roster RosterFromJson(const nlohmann::json& j);

nlohmann::json ConfigToJson(const GenerationConfig& config);
// Accepts either "k" (single size) or "selection_sizes" (list).
GenerationConfig ConfigFromJson(const nlohmann::json& j);
GenerationConfig ReadGenerationConfig(const std::filesystem::path& path);

nlohmann::json MeasuresToJson(const MeasureVector& m);
nlohmann::json ScenarioPatternToJson(const Scenario& s);

nlohmann::json PoolToJson(const ScenarioPool& pool);

// Parses and validates: version, schema, id uniqueness, cluster partition and
// measures recomputed from roster + pattern (tolerance 1e-9). Any failure is
// a LoadError; scenario-level failures name the scenario id.
ScenarioPool PoolFromJson(const nlohmann::json& j);

// Serialized form is deterministic for a given pool.
std::string SerializePool(const ScenarioPool& pool);
void WritePool(const ScenarioPool& pool, const std::filesystem::path& path);
ScenarioPool ReadPool(const std::filesystem::path& path);

}  // namespace fairceptron

#endif  // FAIRCEPTRON_POOL_IO_H_
