#ifndef FAIRCEPTRON_QUESTIONNAIRE_H_
#define FAIRCEPTRON_QUESTIONNAIRE_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fairceptron {

enum class ItemType { kLikert, kCategorical, kVas };

struct QuestionnaireItem {
  std::string id;
  std::string text;
  ItemType type = ItemType::kLikert;
  int scale_min = 1;                 // likert only
  int scale_max = 5;                 // likert only
  std::vector<std::string> options;  // categorical only
  bool reverse_coded = false;
  std::optional<std::string> trait;
};

// Answers keep their JSON type: integer (likert), string (categorical),
// number in [0, 1] (vas).
using Answers = std::map<std::string, nlohmann::json>;

struct QuestionnaireSchema {
  std::vector<QuestionnaireItem> items;
  std::map<std::string, std::vector<std::string>> traits;

  const QuestionnaireItem* Find(const std::string& item_id) const;

  // Throws ValidationError: unknown trait items, duplicate ids, reverse
  // coding on a non-likert item, empty categorical options.
  void Validate() const;

  // Throws ValidationError naming every offending item id.
  void ValidateAnswers(const Answers& answers) const;
};

QuestionnaireSchema QuestionnaireFromJson(const nlohmann::json& j);
nlohmann::json QuestionnaireToJson(const QuestionnaireSchema& schema);
QuestionnaireSchema ReadQuestionnaire(const std::filesystem::path& path);

// Plain-text rendering of an answer for CSV export.
std::string AnswerToString(const nlohmann::json& value);

}  // namespace fairceptron

#endif  // FAIRCEPTRON_QUESTIONNAIRE_H_
