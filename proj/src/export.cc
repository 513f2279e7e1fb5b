#include "fairceptron/export.h"

#include <unordered_map>

#include "fairceptron/csv.h"
#include "fairceptron/errors.h"
#include "fairceptron/util.h"

namespace fairceptron {

using nlohmann::json;

std::vector<ExportRow> ResponseRows(const StudySnapshot& snapshot,
                                    const ScenarioPool& pool) {
  std::unordered_map<std::string, const Scenario*> by_id;
  for (const auto& s : pool.scenarios) by_id.emplace(s.id, &s);

  std::vector<ExportRow> rows;
  for (const auto& session : snapshot.sessions) {
    const std::string created = FormatTimestamp(session.created_at);
    for (const auto& r : session.responses) {
      const auto it = by_id.find(r.scenario_id);
      if (it == by_id.end()) {
        throw NotFoundError("export: unknown scenario " + r.scenario_id);
      }
      const Scenario& s = *it->second;
      rows.push_back({snapshot.study_id, session.id, created,
                      std::to_string(r.position_in_session), s.id,
                      ScenarioTypeName(s.type), std::to_string(s.cluster),
                      FormatDouble(r.rating), FormatDouble(r.answer_time_ms),
                      FormatDouble(r.uncertainty),
                      FormatOptional(s.measures.ordering_utility),
                      FormatOptional(s.measures.signed_representation),
                      FormatOptional(s.measures.selection_utility),
                      FormatOptional(s.measures.parity_difference)});
    }
  }
  return rows;
}

std::vector<ExportRow> QuestionnaireRows(const StudySnapshot& snapshot) {
  std::vector<ExportRow> rows;
  for (const auto& session : snapshot.sessions) {
    if (!session.answers) continue;
    for (const auto& [item, value] : *session.answers) {
      rows.push_back(
          {snapshot.study_id, session.id, item, AnswerToString(value)});
    }
  }
  return rows;
}

std::string ResponsesCsv(const StudySnapshot& snapshot,
                         const ScenarioPool& pool) {
  std::string out = csv::FormatRow({kResponseColumns.begin(),
                                    kResponseColumns.end()});
  for (const auto& row : ResponseRows(snapshot, pool)) {
    out += csv::FormatRow(row);
  }
  return out;
}

std::string QuestionnaireCsv(const StudySnapshot& snapshot) {
  std::string out = csv::FormatRow({kQuestionnaireColumns.begin(),
                                    kQuestionnaireColumns.end()});
  for (const auto& row : QuestionnaireRows(snapshot)) {
    out += csv::FormatRow(row);
  }
  return out;
}

json ExportJson(const StudySnapshot& snapshot, const ScenarioPool& pool) {
  auto number_or_null = [](const std::string& cell) -> json {
    if (cell.empty()) return nullptr;
    return *ParseDouble(cell);
  };
  json responses = json::array();
  for (const auto& row : ResponseRows(snapshot, pool)) {
    json o = json::object();
    for (std::size_t c = 0; c < kResponseColumns.size(); ++c) {
      const std::string column = kResponseColumns[c];
      if (column == "position_in_session" || column == "cluster") {
        o[column] = *ParseInt(row[c]);
      } else if (c >= 7) {
        o[column] = number_or_null(row[c]);
      } else {
        o[column] = row[c];
      }
    }
    responses.push_back(std::move(o));
  }

  json questionnaire = json::array();
  for (const auto& session : snapshot.sessions) {
    if (!session.answers) continue;
    for (const auto& [item, value] : *session.answers) {
      questionnaire.push_back({{"study_id", snapshot.study_id},
                               {"session_id", session.id},
                               {"item_id", item},
                               {"value", value}});
    }
  }
  return {{"responses", std::move(responses)},
          {"questionnaire", std::move(questionnaire)}};
}

}  // namespace fairceptron
