#include "fairceptron/questionnaire.h"

#include <algorithm>
#include <fstream>
#include <set>

#include "fairceptron/errors.h"
#include "fairceptron/util.h"

namespace fairceptron {

using nlohmann::json;

namespace {

ItemType ParseItemType(const std::string& name) {
  if (name == "likert") return ItemType::kLikert;
  if (name == "categorical") return ItemType::kCategorical;
  if (name == "vas") return ItemType::kVas;
  throw ValidationError("unknown questionnaire item type '" + name + "'");
}

const char* ItemTypeName(ItemType type) {
  switch (type) {
    case ItemType::kLikert:
      return "likert";
    case ItemType::kCategorical:
      return "categorical";
    case ItemType::kVas:
      return "vas";
  }
  return "";
}

bool AnswerMatches(const QuestionnaireItem& item, const json& value) {
  switch (item.type) {
    case ItemType::kLikert: {
      if (!value.is_number_integer()) return false;
      const auto v = value.get<std::int64_t>();
      return v >= item.scale_min && v <= item.scale_max;
    }
    case ItemType::kCategorical:
      return value.is_string() &&
             std::find(item.options.begin(), item.options.end(),
                       value.get<std::string>()) != item.options.end();
    case ItemType::kVas: {
      if (!value.is_number()) return false;
      const double v = value.get<double>();
      return v >= 0.0 && v <= 1.0;
    }
  }
  return false;
}

}  // namespace

const QuestionnaireItem* QuestionnaireSchema::Find(
    const std::string& item_id) const {
  for (const auto& item : items) {
    if (item.id == item_id) return &item;
  }
  return nullptr;
}

void QuestionnaireSchema::Validate() const {
  std::set<std::string> ids;
  for (const auto& item : items) {
    if (!ids.insert(item.id).second) {
      throw ValidationError("duplicate questionnaire item '" + item.id + "'");
    }
    if (item.reverse_coded && item.type != ItemType::kLikert) {
      throw ValidationError("item '" + item.id +
                            "': reverse coding needs a bounded integer scale");
    }
    if (item.type == ItemType::kLikert && item.scale_min >= item.scale_max) {
      throw ValidationError("item '" + item.id + "': empty likert scale");
    }
    if (item.type == ItemType::kCategorical && item.options.empty()) {
      throw ValidationError("item '" + item.id + "': no categorical options");
    }
  }
  for (const auto& [trait, members] : traits) {
    for (const auto& id : members) {
      if (!ids.count(id)) {
        throw ValidationError("trait '" + trait + "' refers to unknown item '" +
                              id + "'");
      }
    }
  }
}

void QuestionnaireSchema::ValidateAnswers(const Answers& answers) const {
  std::vector<std::string> offending;
  for (const auto& [id, value] : answers) {
    const QuestionnaireItem* item = Find(id);
    if (item == nullptr || !AnswerMatches(*item, value)) offending.push_back(id);
  }
  if (!offending.empty()) {
    std::string message = "invalid questionnaire answers for items:";
    for (const auto& id : offending) message += " " + id;
    throw ValidationError(message);
  }
}

QuestionnaireSchema QuestionnaireFromJson(const json& j) {
  QuestionnaireSchema schema;
  try {
    for (const auto& ji : j.at("items")) {
      QuestionnaireItem item;
      item.id = ji.at("id").get<std::string>();
      item.text = ji.value("text", "");
      item.type = ParseItemType(ji.value("type", "likert"));
      item.scale_min = ji.value("min", 1);
      item.scale_max = ji.value("max", 5);
      if (ji.contains("options")) {
        item.options = ji.at("options").get<std::vector<std::string>>();
      }
      item.reverse_coded = ji.value("reverse", false);
      if (ji.contains("trait") && !ji.at("trait").is_null()) {
        item.trait = ji.at("trait").get<std::string>();
      }
      schema.items.push_back(std::move(item));
    }
    if (j.contains("traits")) {
      schema.traits =
          j.at("traits").get<std::map<std::string, std::vector<std::string>>>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("questionnaire schema: ") + e.what());
  }
  // Items may name their trait inline instead of in the traits map.
  for (const auto& item : schema.items) {
    if (!item.trait) continue;
    auto& members = schema.traits[*item.trait];
    if (std::find(members.begin(), members.end(), item.id) == members.end()) {
      members.push_back(item.id);
    }
  }
  schema.Validate();
  return schema;
}

json QuestionnaireToJson(const QuestionnaireSchema& schema) {
  json items = json::array();
  for (const auto& item : schema.items) {
    json ji = {{"id", item.id},
               {"text", item.text},
               {"type", ItemTypeName(item.type)}};
    if (item.type == ItemType::kLikert) {
      ji["min"] = item.scale_min;
      ji["max"] = item.scale_max;
      ji["reverse"] = item.reverse_coded;
    }
    if (item.type == ItemType::kCategorical) ji["options"] = item.options;
    if (item.trait) ji["trait"] = *item.trait;
    items.push_back(std::move(ji));
  }
  return {{"items", std::move(items)}, {"traits", schema.traits}};
}

QuestionnaireSchema ReadQuestionnaire(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open questionnaire " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return QuestionnaireFromJson(j);
}

std::string AnswerToString(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
  if (value.is_number()) return FormatDouble(value.get<double>());
  return value.dump();
}

}  // namespace fairceptron
