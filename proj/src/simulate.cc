#include "fairceptron/simulate.h"

#include <algorithm>
#include <fstream>
#include <memory>

#include "fairceptron/errors.h"
#include "fairceptron/export.h"
#include "fairceptron/rng.h"

namespace fairceptron {

using nlohmann::json;

namespace {

constexpr const char* kSimulationToken = "simulation";

RaterModel RaterModelFromJson(const json& j, const RaterModel& defaults) {
  RaterModel model = defaults;
  model.intercept = j.value("intercept", model.intercept);
  model.noise_sd = j.value("noise_sd", model.noise_sd);
  if (j.contains("weights")) {
    model.weights.clear();
    for (const auto& [name, weight] : j.at("weights").items()) {
      model.weights[ParseMeasure(name)] = weight.get<double>();
    }
  }
  if (j.contains("bias")) {
    if (j.at("bias").is_null()) {
      model.bias.reset();
    } else {
      const auto& b = j.at("bias");
      GroupBias bias;
      bias.penalized_group = b.at("penalized_group").get<std::string>();
      bias.utility_below = b.value("utility_below", bias.utility_below);
      bias.penalty = b.value("penalty", bias.penalty);
      model.bias = bias;
    }
  }
  if (model.noise_sd < 0) throw ValidationError("noise_sd must be >= 0");
  return model;
}

// Builds a short slider history ending at `rating`.
SliderTrace SyntheticTrace(double rating, Rng& rng) {
  SliderTrace trace;
  trace.shown_at = 0;
  const int adjustments = 1 + static_cast<int>(rng.UniformIndex(3));
  double t = 0;
  for (int i = 0; i < adjustments; ++i) {
    t += 300 + static_cast<double>(rng.UniformIndex(1700));
    const bool final = i == adjustments - 1;
    const double value =
        final ? rating : std::clamp(rating + 0.1 * rng.Normal(), 0.0, 1.0);
    trace.events.push_back({t, value});
  }
  trace.committed_at = t + 200 + static_cast<double>(rng.UniformIndex(600));
  return trace;
}

}  // namespace

double RaterModel::MeanRating(const Scenario& scenario,
                              const std::string& protected_group) const {
  double mean = intercept;
  for (const auto& [measure, weight] : weights) {
    if (const auto v = MeasureValue(scenario.measures, measure)) {
      mean += weight * *v;
    }
  }
  if (bias) {
    const bool ranking = scenario.type == ScenarioType::kRanking;
    const double utility = ranking
                               ? scenario.measures.ordering_utility.value()
                               : scenario.measures.selection_utility.value();
    const double favour = ranking
                              ? scenario.measures.signed_representation.value()
                              : scenario.measures.parity_difference.value();
    // favour > 0 means the protected group is favoured.
    const bool penalized_favoured = bias->penalized_group == protected_group
                                        ? favour > 0
                                        : favour < 0;
    if (utility < bias->utility_below && penalized_favoured) {
      mean -= bias->penalty;
    }
  }
  return mean;
}

SimulationModel SimulationModelFromJson(const json& j) {
  try {
    SimulationModel model;
    model.base = RaterModelFromJson(j, RaterModel{});
    if (j.contains("attribute")) {
      const auto& a = j.at("attribute");
      AttributeModel attribute;
      attribute.item_id = a.at("item_id").get<std::string>();
      double total = 0;
      for (const auto& [value, p] : a.at("values").items()) {
        attribute.values.emplace_back(value, p.get<double>());
        total += p.get<double>();
      }
      if (attribute.values.empty() || total <= 0) {
        throw ValidationError("attribute values need positive probabilities");
      }
      if (a.contains("models")) {
        for (const auto& [value, jm] : a.at("models").items()) {
          attribute.overrides[value] = RaterModelFromJson(jm, model.base);
        }
      }
      model.attribute = std::move(attribute);
    }
    return model;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("simulation model: ") + e.what());
  }
}

SimulationModel ReadSimulationModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open model " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return SimulationModelFromJson(j);
}

SimulatedStudy SimulateRaters(const ScenarioPool& pool,
                              const SimulationModel& model, int sessions,
                              std::uint64_t seed,
                              const QuestionnaireSchema& questionnaire) {
  QuestionnaireSchema schema = questionnaire;
  if (model.attribute && schema.Find(model.attribute->item_id) == nullptr) {
    QuestionnaireItem item;
    item.id = model.attribute->item_id;
    item.type = ItemType::kCategorical;
    for (const auto& [value, p] : model.attribute->values) {
      item.options.push_back(value);
    }
    schema.items.push_back(std::move(item));
  }

  StudyConfig config;
  config.study_id = "simulated";
  config.export_token = kSimulationToken;
  config.session_seed = seed;
  auto clock_ms = std::make_shared<std::int64_t>(1767225600000);  // 2026-01-01
  Study study(config, std::make_shared<const ScenarioPool>(pool), schema,
              std::make_unique<MemoryEventStore>(), [clock_ms] {
                *clock_ms += 1000;
                return Timestamp(std::chrono::milliseconds(*clock_ms));
              });

  const std::string& protected_group = pool.config.roster.protected_group;
  std::map<std::string, const Scenario*> by_id;
  for (const auto& s : pool.scenarios) by_id.emplace(s.id, &s);

  for (int i = 0; i < sessions; ++i) {
    Rng rng = Rng::ForStream(SplitMix64(seed), static_cast<std::uint64_t>(i));
    const Session session = study.CreateSession();

    const RaterModel* rater = &model.base;
    std::optional<std::string> attribute_value;
    if (model.attribute) {
      double total = 0;
      for (const auto& [value, p] : model.attribute->values) total += p;
      double draw = rng.Uniform01() * total;
      attribute_value = model.attribute->values.back().first;
      for (const auto& [value, p] : model.attribute->values) {
        if (draw < p) {
          attribute_value = value;
          break;
        }
        draw -= p;
      }
      const auto it = model.attribute->overrides.find(*attribute_value);
      if (it != model.attribute->overrides.end()) rater = &it->second;
    }

    for (const auto& scenario_id : session.assignment) {
      const Scenario& scenario = *by_id.at(scenario_id);
      double rating = rater->MeanRating(scenario, protected_group);
      if (rater->noise_sd > 0) rating += rater->noise_sd * rng.Normal();
      rating = std::clamp(rating, 0.0, 1.0);
      study.SubmitResponse(session.id, scenario_id, SyntheticTrace(rating, rng));
    }
    Answers answers;
    if (attribute_value) answers[model.attribute->item_id] = *attribute_value;
    study.SubmitQuestionnaire(session.id, answers);
  }

  SimulatedStudy result;
  result.snapshot = study.Snapshot();
  result.responses_csv = study.Export(ExportFormat::kCsv, kSimulationToken);
  result.questionnaire_csv = study.Export(ExportFormat::kCsv, kSimulationToken,
                                          ExportTable::kQuestionnaire);
  result.export_json = study.Export(ExportFormat::kJson, kSimulationToken);
  return result;
}

}  // namespace fairceptron
