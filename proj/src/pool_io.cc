#include "fairceptron/pool_io.h"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fairceptron/errors.h"

namespace fairceptron {

using nlohmann::json;

namespace {

constexpr double kMeasureTolerance = 1e-9;

const json& Field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw LoadError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

std::optional<double> OptionalNumber(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

bool Close(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || std::abs(*a - *b) <= kMeasureTolerance;
}

}  // namespace

json RosterToJson(const Roster& roster) {
  json personas = json::array();
  for (const auto& p : roster.personas) {
    personas.push_back(
        {{"id", p.id}, {"group", p.group}, {"qualification", p.qualification}});
  }
  return {{"protected_group", roster.protected_group},
          {"personas", std::move(personas)}};
}

Roster RosterFromJson(const json& j) {
  Roster roster;
  roster.protected_group =
      Field(j, "protected_group", "roster").get<std::string>();
  for (const auto& p : Field(j, "personas", "roster")) {
    roster.personas.push_back({Field(p, "id", "persona").get<std::string>(),
                               Field(p, "group", "persona").get<std::string>(),
                               Field(p, "qualification", "persona").get<double>()});
  }
  return roster;
}

json ConfigToJson(const GenerationConfig& config) {
  json types = json::array();
  for (const auto t : config.EnabledTypes()) types.push_back(ScenarioTypeName(t));
  return {{"roster", RosterToJson(config.roster)},
          {"scenario_types", std::move(types)},
          {"selection_sizes", config.selection_sizes},
          {"cluster_count", config.cluster_count},
          {"cluster_seed", config.cluster_seed},
          {"enumeration_cap", config.enumeration_cap}};
}

GenerationConfig ConfigFromJson(const json& j) {
  try {
    GenerationConfig config;
    config.roster = RosterFromJson(Field(j, "roster", "config"));
    if (j.contains("scenario_types")) {
      config.rankings = config.classifications = false;
      for (const auto& t : j.at("scenario_types")) {
        const auto type = ParseScenarioType(t.get<std::string>());
        (type == ScenarioType::kRanking ? config.rankings
                                        : config.classifications) = true;
      }
    }
    if (j.contains("selection_sizes")) {
      config.selection_sizes = j.at("selection_sizes").get<std::vector<int>>();
    } else if (j.contains("k")) {
      config.selection_sizes = {j.at("k").get<int>()};
    }
    if (!config.classifications) config.selection_sizes.clear();
    config.cluster_count = j.value("cluster_count", 10);
    config.cluster_seed = j.value("cluster_seed", std::uint64_t{42});
    config.enumeration_cap =
        j.value("enumeration_cap", std::uint64_t{1'000'000});
    return config;
  } catch (const json::exception& e) {
    throw LoadError(std::string("generation config: ") + e.what());
  } catch (const ValidationError& e) {
    throw LoadError(std::string("generation config: ") + e.what());
  }
}

GenerationConfig ReadGenerationConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return ConfigFromJson(j);
}

json MeasuresToJson(const MeasureVector& m) {
  auto value = [](const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
  };
  return {{"ordering_utility", value(m.ordering_utility)},
          {"signed_representation", value(m.signed_representation)},
          {"selection_utility", value(m.selection_utility)},
          {"parity_difference", value(m.parity_difference)}};
}

json ScenarioPatternToJson(const Scenario& s) {
  if (s.type == ScenarioType::kRanking) return s.ranking_pattern;
  json pattern = json::array();
  for (const auto& g : s.selection_pattern) {
    pattern.push_back(
        {{"group", g.group}, {"selected", g.selected}, {"rejected", g.rejected}});
  }
  return pattern;
}

json PoolToJson(const ScenarioPool& pool) {
  json scenarios = json::array();
  for (const auto& s : pool.scenarios) {
    scenarios.push_back({{"id", s.id},
                         {"type", ScenarioTypeName(s.type)},
                         {"pattern", ScenarioPatternToJson(s)},
                         {"qualifications", s.qualifications},
                         {"measures", MeasuresToJson(s.measures)},
                         {"cluster", s.cluster}});
  }
  json clusters = json::object();
  for (const auto& [type, members] : pool.clusters) {
    clusters[ScenarioTypeName(type)] = members;
  }
  return {{"version", pool.version},
          {"config", ConfigToJson(pool.config)},
          {"scenarios", std::move(scenarios)},
          {"clusters", std::move(clusters)}};
}

ScenarioPool PoolFromJson(const json& j) {
  ScenarioPool pool;
  const auto version = Field(j, "version", "pool");
  if (!version.is_string() || version.get<std::string>() !=
                                  ScenarioPool::kFormatVersion) {
    throw LoadError("unsupported pool version " + version.dump() +
                    " (expected \"" + ScenarioPool::kFormatVersion + "\")");
  }
  pool.config = ConfigFromJson(Field(j, "config", "pool"));
  try {
    pool.config.Validate();
  } catch (const Error& e) {
    throw LoadError(std::string("pool config: ") + e.what());
  }

  std::set<std::string> ids;
  for (const auto& js : Field(j, "scenarios", "pool")) {
    const std::string id = Field(js, "id", "scenario").get<std::string>();
    const std::string where = "scenario " + id;
    try {
      Scenario s;
      s.id = id;
      s.type = ParseScenarioType(Field(js, "type", where).get<std::string>());
      const auto& pattern = Field(js, "pattern", where);
      if (s.type == ScenarioType::kRanking) {
        s.ranking_pattern = pattern.get<std::vector<std::string>>();
      } else {
        for (const auto& g : pattern) {
          s.selection_pattern.push_back(
              {Field(g, "group", where).get<std::string>(),
               Field(g, "selected", where).get<int>(),
               Field(g, "rejected", where).get<int>()});
        }
      }
      s.qualifications =
          Field(js, "qualifications", where).get<std::vector<double>>();
      const auto& m = Field(js, "measures", where);
      s.measures.ordering_utility = OptionalNumber(m, "ordering_utility");
      s.measures.signed_representation =
          OptionalNumber(m, "signed_representation");
      s.measures.selection_utility = OptionalNumber(m, "selection_utility");
      s.measures.parity_difference = OptionalNumber(m, "parity_difference");
      s.cluster = Field(js, "cluster", where).get<int>();

      if (!ids.insert(id).second) throw LoadError("duplicate scenario id");
      const auto outcome = ScenarioOutcome(s, pool.config.roster);
      const auto fresh = measures::ComputeMeasureVector(
          outcome, pool.config.roster.protected_group);
      if (!Close(fresh.ordering_utility, s.measures.ordering_utility) ||
          !Close(fresh.signed_representation,
                 s.measures.signed_representation) ||
          !Close(fresh.selection_utility, s.measures.selection_utility) ||
          !Close(fresh.parity_difference, s.measures.parity_difference)) {
        throw LoadError("stored measures differ from recomputed measures");
      }
      if (ScenarioId(s) != id) {
        throw LoadError("id does not match pattern and qualifications");
      }
      pool.scenarios.push_back(std::move(s));
    } catch (const LoadError& e) {
      throw LoadError(where + ": " + e.what());
    } catch (const Error& e) {
      throw LoadError(where + ": " + e.what());
    } catch (const json::exception& e) {
      throw LoadError(where + ": " + e.what());
    }
  }

  // Clusters must partition each enabled type's scenarios with no empties.
  const auto& clusters = Field(j, "clusters", "pool");
  std::map<std::string, const Scenario*> by_id;
  for (const auto& s : pool.scenarios) by_id.emplace(s.id, &s);
  std::set<std::string> clustered;
  for (const ScenarioType type : pool.config.EnabledTypes()) {
    const char* name = ScenarioTypeName(type);
    if (!clusters.contains(name)) {
      throw LoadError(std::string("pool: no clusters for type ") + name);
    }
    auto members = clusters.at(name).get<std::vector<std::vector<std::string>>>();
    for (std::size_t c = 0; c < members.size(); ++c) {
      if (members[c].empty()) {
        throw LoadError(std::string("pool: empty ") + name + " cluster " +
                        std::to_string(c));
      }
      for (const auto& id : members[c]) {
        const auto found = by_id.find(id);
        const Scenario* s = found == by_id.end() ? nullptr : found->second;
        if (s == nullptr || s->type != type ||
            s->cluster != static_cast<int>(c)) {
          throw LoadError("scenario " + id + ": inconsistent cluster listing");
        }
        if (!clustered.insert(id).second) {
          throw LoadError("scenario " + id + ": listed in two clusters");
        }
      }
    }
    pool.clusters[type] = std::move(members);
  }
  for (const auto& s : pool.scenarios) {
    if (!clustered.count(s.id)) {
      throw LoadError("scenario " + s.id + ": not assigned to any cluster");
    }
  }
  return pool;
}

std::string SerializePool(const ScenarioPool& pool) {
  return PoolToJson(pool).dump(1) + "\n";
}

void WritePool(const ScenarioPool& pool, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write pool to " + path.string());
  out << SerializePool(pool);
  if (!out) throw LoadError("failed writing pool to " + path.string());
}

ScenarioPool ReadPool(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open pool " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return PoolFromJson(j);
}

}  // namespace fairceptron
