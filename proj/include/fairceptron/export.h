#ifndef FAIRCEPTRON_EXPORT_H_
#define FAIRCEPTRON_EXPORT_H_

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairceptron/generator.h"
#include "fairceptron/study.h"

namespace fairceptron {

inline constexpr std::array<const char*, 14> kResponseColumns = {
    "study_id",         "session_id",         "session_created_at",
    "position_in_session", "scenario_id",     "scenario_type",
    "cluster",          "rating",             "answer_time_ms",
    "uncertainty",      "ordering_utility",   "signed_representation",
    "selection_utility", "parity_difference"};

inline constexpr std::array<const char*, 4> kQuestionnaireColumns = {
    "study_id", "session_id", "item_id", "value"};

// Flat string cells in column order; inapplicable measures are empty.
using ExportRow = std::vector<std::string>;

// Response rows ordered by session creation, then position in session.
std::vector<ExportRow> ResponseRows(const StudySnapshot& snapshot,
                                    const ScenarioPool& pool);
// Questionnaire rows ordered by session creation, then item id.
std::vector<ExportRow> QuestionnaireRows(const StudySnapshot& snapshot);

std::string ResponsesCsv(const StudySnapshot& snapshot,
                         const ScenarioPool& pool);
std::string QuestionnaireCsv(const StudySnapshot& snapshot);

// {"responses":[{column: value}], "questionnaire":[{...}]}; numeric columns
// are JSON numbers, empty measures are null.
nlohmann::json ExportJson(const StudySnapshot& snapshot,
                          const ScenarioPool& pool);

}  // namespace fairceptron

#endif  // FAIRCEPTRON_EXPORT_H_
