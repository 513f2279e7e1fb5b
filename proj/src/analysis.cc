#include "fairceptron/analysis.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fairceptron/csv.h"
#include "fairceptron/errors.h"
#include "fairceptron/export.h"
#include "fairceptron/util.h"

namespace fairceptron {

using nlohmann::json;

const char* MeasureName(Measure measure) {
  switch (measure) {
    case Measure::kOrderingUtility:
      return "ordering_utility";
    case Measure::kSignedRepresentation:
      return "signed_representation";
    case Measure::kSelectionUtility:
      return "selection_utility";
    case Measure::kParityDifference:
      return "parity_difference";
  }
  return "";
}

Measure ParseMeasure(const std::string& name) {
  for (const Measure m :
       {Measure::kOrderingUtility, Measure::kSignedRepresentation,
        Measure::kSelectionUtility, Measure::kParityDifference}) {
    if (name == MeasureName(m)) return m;
  }
  throw ValidationError("unknown measure '" + name + "'");
}

ScenarioType MeasureScenarioType(Measure measure) {
  return measure == Measure::kOrderingUtility ||
                 measure == Measure::kSignedRepresentation
             ? ScenarioType::kRanking
             : ScenarioType::kClassification;
}

std::optional<double> MeasureValue(const MeasureVector& m, Measure measure) {
  switch (measure) {
    case Measure::kOrderingUtility:
      return m.ordering_utility;
    case Measure::kSignedRepresentation:
      return m.signed_representation;
    case Measure::kSelectionUtility:
      return m.selection_utility;
    case Measure::kParityDifference:
      return m.parity_difference;
  }
  return std::nullopt;
}

std::pair<double, double> MeasureRange(Measure measure) {
  return measure == Measure::kOrderingUtility ||
                 measure == Measure::kSelectionUtility
             ? std::pair{0.0, 1.0}
             : std::pair{-1.0, 1.0};
}

std::vector<std::string> ResponseTable::Sessions() const {
  std::vector<std::string> sessions;
  std::set<std::string> seen;
  for (const auto& row : rows) {
    if (seen.insert(row.session_id).second) sessions.push_back(row.session_id);
  }
  return sessions;
}

namespace {

using Cells = std::unordered_map<std::string, std::string>;

std::string RowLabel(std::size_t row_number) {
  return "row " + std::to_string(row_number);
}

double RequireNumber(const Cells& cells, const char* column,
                     std::size_t row_number) {
  const auto value = ParseDouble(cells.at(column));
  if (!value || !std::isfinite(*value)) {
    throw ValidationError(RowLabel(row_number) + ": column " + column +
                          " is not a number");
  }
  return *value;
}

std::optional<double> OptionalNumber(const Cells& cells, const char* column,
                                     std::size_t row_number) {
  if (cells.at(column).empty()) return std::nullopt;
  return RequireNumber(cells, column, row_number);
}

ResponseRow BuildRow(const Cells& cells, std::size_t row_number) {
  ResponseRow row;
  row.study_id = cells.at("study_id");
  row.session_id = cells.at("session_id");
  row.session_created_at = cells.at("session_created_at");
  row.scenario_id = cells.at("scenario_id");
  try {
    row.scenario_type = ParseScenarioType(cells.at("scenario_type"));
  } catch (const ValidationError& e) {
    throw ValidationError(RowLabel(row_number) + ": " + e.what());
  }
  const auto position = ParseInt(cells.at("position_in_session"));
  const auto cluster = ParseInt(cells.at("cluster"));
  if (!position || !cluster) {
    throw ValidationError(RowLabel(row_number) +
                          ": position_in_session and cluster must be integers");
  }
  row.position_in_session = static_cast<int>(*position);
  row.cluster = static_cast<int>(*cluster);
  row.rating = RequireNumber(cells, "rating", row_number);
  if (row.rating < 0 || row.rating > 1) {
    throw ValidationError(RowLabel(row_number) + ": rating " +
                          FormatDouble(row.rating) + " outside [0, 1]");
  }
  row.answer_time_ms = RequireNumber(cells, "answer_time_ms", row_number);
  row.uncertainty = RequireNumber(cells, "uncertainty", row_number);
  if (row.uncertainty < 0) {
    throw ValidationError(RowLabel(row_number) + ": negative uncertainty");
  }
  auto& m = row.measures;
  m.ordering_utility = OptionalNumber(cells, "ordering_utility", row_number);
  m.signed_representation =
      OptionalNumber(cells, "signed_representation", row_number);
  m.selection_utility = OptionalNumber(cells, "selection_utility", row_number);
  m.parity_difference = OptionalNumber(cells, "parity_difference", row_number);
  const bool ranking = row.scenario_type == ScenarioType::kRanking;
  const bool ranking_measures =
      m.ordering_utility.has_value() && m.signed_representation.has_value();
  const bool selection_measures =
      m.selection_utility.has_value() && m.parity_difference.has_value();
  const bool any_ranking =
      m.ordering_utility.has_value() || m.signed_representation.has_value();
  const bool any_selection =
      m.selection_utility.has_value() || m.parity_difference.has_value();
  if (ranking ? (!ranking_measures || any_selection)
              : (!selection_measures || any_ranking)) {
    throw ValidationError(RowLabel(row_number) +
                          ": measure columns do not match scenario type " +
                          ScenarioTypeName(row.scenario_type));
  }
  return row;
}

void AddRow(ResponseTable& table, std::set<std::pair<std::string, std::string>>&
                                      keys,
            ResponseRow row, std::size_t row_number) {
  if (!keys.emplace(row.session_id, row.scenario_id).second) {
    throw ValidationError(RowLabel(row_number) + ": duplicate response for (" +
                          row.session_id + ", " + row.scenario_id + ")");
  }
  table.rows.push_back(std::move(row));
}

template <std::size_t N>
std::vector<std::size_t> ColumnIndices(const csv::Row& header,
                                       const std::array<const char*, N>& cols,
                                       const char* table_name) {
  std::vector<std::size_t> indices;
  for (const char* column : cols) {
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) {
      throw ValidationError(std::string(table_name) + ": missing column " +
                            column);
    }
    indices.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  return indices;
}

}  // namespace

ResponseTable ParseResponsesCsv(std::string_view responses_csv,
                                std::string_view questionnaire_csv) {
  ResponseTable table;
  const auto rows = csv::Parse(responses_csv);
  if (rows.empty()) throw ValidationError("responses: missing header row");
  const auto indices = ColumnIndices(rows[0], kResponseColumns, "responses");
  std::set<std::pair<std::string, std::string>> keys;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) {
      throw ValidationError(RowLabel(r) + ": expected " +
                            std::to_string(rows[0].size()) + " fields, got " +
                            std::to_string(rows[r].size()));
    }
    Cells cells;
    for (std::size_t c = 0; c < kResponseColumns.size(); ++c) {
      cells[kResponseColumns[c]] = rows[r][indices[c]];
    }
    AddRow(table, keys, BuildRow(cells, r), r);
  }

  if (!questionnaire_csv.empty()) {
    const auto q = csv::Parse(questionnaire_csv);
    if (q.empty()) throw ValidationError("questionnaire: missing header row");
    const auto qi = ColumnIndices(q[0], kQuestionnaireColumns, "questionnaire");
    for (std::size_t r = 1; r < q.size(); ++r) {
      if (q[r].size() != q[0].size()) {
        throw ValidationError("questionnaire " + RowLabel(r) +
                              ": wrong field count");
      }
      table.attributes[q[r][qi[1]]][q[r][qi[2]]] = q[r][qi[3]];
    }
  }
  return table;
}

ResponseTable ParseExportJson(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("export json: ") + e.what());
  }
  if (!j.contains("responses") || !j.at("responses").is_array()) {
    throw ValidationError("export json: missing column set 'responses'");
  }
  ResponseTable table;
  std::set<std::pair<std::string, std::string>> keys;
  std::size_t r = 0;
  for (const auto& jr : j.at("responses")) {
    ++r;
    Cells cells;
    for (const char* column : kResponseColumns) {
      if (!jr.contains(column)) {
        throw ValidationError("responses: missing column " +
                              std::string(column) + " (" + RowLabel(r) + ")");
      }
      const auto& v = jr.at(column);
      if (v.is_null()) {
        cells[column] = "";
      } else if (v.is_string()) {
        cells[column] = v.get<std::string>();
      } else if (v.is_number_integer()) {
        cells[column] = std::to_string(v.get<std::int64_t>());
      } else if (v.is_number()) {
        cells[column] = FormatDouble(v.get<double>());
      } else {
        throw ValidationError(RowLabel(r) + ": column " + column +
                              " has an unsupported type");
      }
    }
    AddRow(table, keys, BuildRow(cells, r), r);
  }
  if (j.contains("questionnaire")) {
    for (const auto& jq : j.at("questionnaire")) {
      table.attributes[jq.at("session_id").get<std::string>()]
                      [jq.at("item_id").get<std::string>()] =
          AnswerToString(jq.at("value"));
    }
  }
  return table;
}

ResponseTable LoadExport(
    const std::filesystem::path& path, ExportFormat format,
    const std::optional<std::filesystem::path>& questionnaire_csv) {
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw LoadError("cannot open " + p.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };
  const std::string text = slurp(path);
  if (format == ExportFormat::kJson) return ParseExportJson(text);
  const std::string questionnaire =
      questionnaire_csv ? slurp(*questionnaire_csv) : std::string();
  return ParseResponsesCsv(text, questionnaire);
}

BinSpec BinSpec::Uniform(Measure measure, double lower, double upper,
                         int bins) {
  if (bins < 1) throw ValidationError("bin count must be >= 1");
  BinSpec spec;
  spec.measure = measure;
  for (int i = 0; i <= bins; ++i) {
    spec.edges.push_back(lower + (upper - lower) * i / bins);
  }
  spec.edges.back() = upper;
  return spec;
}

BinSpec BinSpec::Uniform(Measure measure, int bins) {
  const auto [lower, upper] = MeasureRange(measure);
  return Uniform(measure, lower, upper, bins);
}

void BinSpec::Validate() const {
  if (edges.size() < 2) throw ValidationError("bin spec needs >= 2 edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) {
      throw ValidationError("bin edges must be strictly increasing");
    }
  }
}

std::optional<int> BinSpec::BinOf(double value) const {
  if (!(value >= edges.front() && value <= edges.back())) return std::nullopt;
  if (value == edges.back()) return BinCount() - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  return static_cast<int>(it - edges.begin()) - 1;
}

HeatmapGrid BinByMeasures(const ResponseTable& table, const BinSpec& x,
                          const BinSpec& y) {
  x.Validate();
  y.Validate();
  const ScenarioType type = MeasureScenarioType(x.measure);
  if (MeasureScenarioType(y.measure) != type) {
    throw DomainError(std::string("measures ") + MeasureName(x.measure) +
                      " and " + MeasureName(y.measure) +
                      " belong to different scenario types");
  }
  const int nx = x.BinCount(), ny = y.BinCount();
  HeatmapGrid grid;
  grid.x = x;
  grid.y = y;
  grid.count = Eigen::MatrixXi::Zero(ny, nx);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(ny, nx);
  std::vector<std::vector<double>> ratings(nx * ny), times(nx * ny),
      uncertainties(nx * ny);

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.scenario_type != type) continue;
    ++grid.rows_considered;
    const auto xv = MeasureValue(row.measures, x.measure);
    const auto yv = MeasureValue(row.measures, y.measure);
    if (!xv || !yv) {
      throw DomainError(std::string("measure column empty for ") +
                        ScenarioTypeName(type) + " row " +
                        std::to_string(r + 1));
    }
    const auto bx = x.BinOf(*xv), by = y.BinOf(*yv);
    if (!bx || !by) {
      ++grid.out_of_range;
      continue;
    }
    grid.count(*by, *bx) += 1;
    sum(*by, *bx) += row.rating;
    const int cell = *by * nx + *bx;
    ratings[cell].push_back(row.rating);
    times[cell].push_back(row.answer_time_ms);
    uncertainties[cell].push_back(row.uncertainty);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  grid.mean = Eigen::MatrixXd::Constant(ny, nx, nan);
  grid.stddev = Eigen::MatrixXd::Constant(ny, nx, nan);
  grid.median_answer_time_ms = Eigen::MatrixXd::Constant(ny, nx, nan);
  grid.median_uncertainty = Eigen::MatrixXd::Constant(ny, nx, nan);
  for (int by = 0; by < ny; ++by) {
    for (int bx = 0; bx < nx; ++bx) {
      const int n = grid.count(by, bx);
      if (n == 0) continue;
      const double mean = sum(by, bx) / n;
      grid.mean(by, bx) = mean;
      double squares = 0;
      const int cell = by * nx + bx;
      for (const double v : ratings[cell]) squares += (v - mean) * (v - mean);
      grid.stddev(by, bx) = n > 1 ? std::sqrt(squares / (n - 1)) : 0.0;
      grid.median_answer_time_ms(by, bx) = stats::Median(times[cell]);
      grid.median_uncertainty(by, bx) = stats::Median(uncertainties[cell]);
    }
  }
  return grid;
}

SubgroupReport SubgroupCompare(const ResponseTable& table,
                               const std::string& attribute, const BinSpec& x,
                               const BinSpec& y) {
  SubgroupReport report;
  report.attribute = attribute;
  std::map<std::string, std::string> group_of;
  for (const auto& session : table.Sessions()) {
    const auto it = table.attributes.find(session);
    if (it == table.attributes.end() || !it->second.count(attribute)) {
      ++report.excluded_sessions;
      continue;
    }
    group_of[session] = it->second.at(attribute);
  }
  std::set<std::string> values;
  for (const auto& [session, value] : group_of) values.insert(value);
  if (group_of.size() < 2 || values.size() < 2) {
    throw DomainError("attribute '" + attribute +
                      "' needs at least 2 sessions with 2 distinct values");
  }

  const ScenarioType type = MeasureScenarioType(x.measure);
  std::map<std::string, ResponseTable> split;
  std::map<std::string, std::vector<double>> ratings;
  for (const auto& row : table.rows) {
    const auto it = group_of.find(row.session_id);
    if (it == group_of.end()) continue;
    split[it->second].rows.push_back(row);
    if (row.scenario_type == type) ratings[it->second].push_back(row.rating);
  }
  for (const auto& value : values) {
    report.grids.emplace(value, BinByMeasures(split[value], x, y));
    const auto& r = ratings[value];
    GroupSummary summary;
    summary.count = r.size();
    if (!r.empty()) {
      double total = 0;
      for (const double v : r) total += v;
      summary.mean = total / r.size();
    }
    report.overall.emplace(value, summary);
  }
  for (auto a = values.begin(); a != values.end(); ++a) {
    for (auto b = std::next(a); b != values.end(); ++b) {
      const auto& ra = ratings[*a];
      const auto& rb = ratings[*b];
      if (ra.empty() || rb.empty()) continue;
      report.tests.push_back(
          {*a, *b, ra.size(), rb.size(), stats::MannWhitneyU(ra, rb)});
    }
  }
  return report;
}

std::map<std::string, TraitScores> ScoreTraits(
    const QuestionnaireSchema& schema,
    const std::map<std::string, Answers>& submissions) {
  for (const auto& [trait, items] : schema.traits) {
    for (const auto& id : items) {
      const QuestionnaireItem* item = schema.Find(id);
      if (item == nullptr) {
        throw ValidationError("trait '" + trait + "' refers to unknown item '" +
                              id + "'");
      }
      if (item->type == ItemType::kCategorical) {
        throw ValidationError("trait '" + trait +
                              "' includes non-numeric item '" + id + "'");
      }
      if (item->reverse_coded && item->type != ItemType::kLikert) {
        throw ValidationError("item '" + id +
                              "': reverse coding on a non-integer scale");
      }
    }
  }

  std::map<std::string, TraitScores> scores;
  for (const auto& [session, answers] : submissions) {
    auto& out = scores[session];
    for (const auto& [trait, items] : schema.traits) {
      double total = 0;
      bool complete = !items.empty();
      for (const auto& id : items) {
        const auto it = answers.find(id);
        if (it == answers.end() || !it->second.is_number()) {
          complete = false;
          break;
        }
        const QuestionnaireItem& item = *schema.Find(id);
        double value = it->second.get<double>();
        if (item.reverse_coded) value = item.scale_max + item.scale_min - value;
        total += value;
      }
      out[trait] = complete ? std::optional<double>(total / items.size())
                            : std::nullopt;
    }
  }
  return scores;
}

std::map<std::string, Answers> SubmissionsFromAttributes(
    const QuestionnaireSchema& schema, const SessionAttributes& attributes) {
  std::map<std::string, Answers> submissions;
  for (const auto& [session, values] : attributes) {
    auto& answers = submissions[session];
    for (const auto& [item_id, text] : values) {
      const QuestionnaireItem* item = schema.Find(item_id);
      if (item == nullptr) continue;
      switch (item->type) {
        case ItemType::kLikert: {
          const auto v = ParseInt(text);
          if (!v) {
            throw ValidationError("session " + session + " item " + item_id +
                                  ": expected an integer");
          }
          answers[item_id] = *v;
          break;
        }
        case ItemType::kCategorical:
          answers[item_id] = text;
          break;
        case ItemType::kVas: {
          const auto v = ParseDouble(text);
          if (!v) {
            throw ValidationError("session " + session + " item " + item_id +
                                  ": expected a number");
          }
          answers[item_id] = *v;
          break;
        }
      }
    }
  }
  return submissions;
}

}  // namespace fairceptron
