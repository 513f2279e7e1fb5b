#ifndef FAIRCEPTRON_SIMULATE_H_
#define FAIRCEPTRON_SIMULATE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fairceptron/analysis.h"
#include "fairceptron/generator.h"
#include "fairceptron/questionnaire.h"
#include "fairceptron/study.h"

namespace fairceptron {

// Lowers ratings of scenarios that favour `penalized_group` while the
// scenario's utility (ordering or selection) is below `utility_below`.
struct GroupBias {
  std::string penalized_group;
  double utility_below = 0.7;
  double penalty = 0.2;
};

// mean = intercept + sum(weight * measure) - bias; rating = clip(mean +
// N(0, noise_sd), 0, 1). Measures absent for a scenario type contribute 0.
struct RaterModel {
  double intercept = 0;
  std::map<Measure, double> weights;
  double noise_sd = 0;
  std::optional<GroupBias> bias;

  double MeanRating(const Scenario& scenario,
                    const std::string& protected_group) const;
};

// A participant attribute drawn per synthetic session and submitted as a
// categorical questionnaire answer; per-value models override the base one.
struct AttributeModel {
  std::string item_id;
  std::vector<std::pair<std::string, double>> values;  // value, probability
  std::map<std::string, RaterModel> overrides;
};

struct SimulationModel {
  RaterModel base;
  std::optional<AttributeModel> attribute;
};

SimulationModel SimulationModelFromJson(const nlohmann::json& j);
SimulationModel ReadSimulationModel(const std::filesystem::path& path);

struct SimulatedStudy {
  StudySnapshot snapshot;
  std::string responses_csv;
  std::string questionnaire_csv;
  std::string export_json;
};

// Runs `sessions` synthetic participants through the study service's own
// session, assignment, response and questionnaire logic (in-memory store,
// fixed seed, fixed clock). Deterministic given `seed`.
SimulatedStudy SimulateRaters(const ScenarioPool& pool,
                              const SimulationModel& model, int sessions,
                              std::uint64_t seed,
                              const QuestionnaireSchema& questionnaire = {});

}  // namespace fairceptron

#endif  // FAIRCEPTRON_SIMULATE_H_
