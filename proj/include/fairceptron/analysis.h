#ifndef FAIRCEPTRON_ANALYSIS_H_
#define FAIRCEPTRON_ANALYSIS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fairceptron/measures.h"
#include "fairceptron/questionnaire.h"
#include "fairceptron/scenario.h"
#include "fairceptron/stats.h"
#include "fairceptron/study.h"

namespace fairceptron {

enum class Measure {
  kOrderingUtility,
  kSignedRepresentation,
  kSelectionUtility,
  kParityDifference,
};

const char* MeasureName(Measure measure);
Measure ParseMeasure(const std::string& name);  // throws ValidationError
ScenarioType MeasureScenarioType(Measure measure);
std::optional<double> MeasureValue(const MeasureVector& m, Measure measure);
// Natural value range: [0, 1] for utilities, [-1, 1] for signed measures.
std::pair<double, double> MeasureRange(Measure measure);

struct ResponseRow {
  std::string study_id;
  std::string session_id;
  std::string session_created_at;
  int position_in_session = 0;
  std::string scenario_id;
  ScenarioType scenario_type = ScenarioType::kRanking;
  int cluster = 0;
  double rating = 0;
  double answer_time_ms = 0;
  double uncertainty = 0;
  MeasureVector measures;

  bool operator==(const ResponseRow&) const = default;
};

// Questionnaire answers per session, kept as the exported text.
using SessionAttributes = std::map<std::string, std::map<std::string, std::string>>;

struct ResponseTable {
  std::vector<ResponseRow> rows;
  SessionAttributes attributes;

  // Distinct session ids in first-appearance order.
  std::vector<std::string> Sessions() const;

  bool operator==(const ResponseTable&) const = default;
};

// Exports as produced by the study service. Errors name the offending column
// or the 1-based data row.
ResponseTable ParseResponsesCsv(std::string_view responses_csv,
                                std::string_view questionnaire_csv = {});
ResponseTable ParseExportJson(std::string_view json_text);
ResponseTable LoadExport(const std::filesystem::path& path, ExportFormat format,
                         const std::optional<std::filesystem::path>&
                             questionnaire_csv = std::nullopt);

// Left-closed, right-open bins; the final bin is closed on the right.
struct BinSpec {
  Measure measure = Measure::kOrderingUtility;
  std::vector<double> edges;

  static BinSpec Uniform(Measure measure, double lower, double upper,
                         int bins);
  static BinSpec Uniform(Measure measure, int bins);  // over MeasureRange

  int BinCount() const { return static_cast<int>(edges.size()) - 1; }
  void Validate() const;  // >= 2 strictly increasing edges
  std::optional<int> BinOf(double value) const;

  bool operator==(const BinSpec&) const = default;
};

// Rows of the matrices are y bins (lowest first), columns are x bins.
// Cells without observations have count 0 and NaN statistics.
struct HeatmapGrid {
  BinSpec x;
  BinSpec y;
  Eigen::MatrixXd mean;
  Eigen::MatrixXd stddev;  // sample (n-1); 0 for a single observation
  Eigen::MatrixXi count;
  Eigen::MatrixXd median_answer_time_ms;
  Eigen::MatrixXd median_uncertainty;
  std::size_t rows_considered = 0;  // rows of the measures' scenario type
  std::size_t out_of_range = 0;

  bool Missing(int y_bin, int x_bin) const { return count(y_bin, x_bin) == 0; }
};

// Both bin measures must belong to one scenario type; rows of other types are
// ignored. Throws DomainError when a row of that type lacks the measure.
HeatmapGrid BinByMeasures(const ResponseTable& table, const BinSpec& x,
                          const BinSpec& y);

struct GroupSummary {
  double mean = 0;
  std::size_t count = 0;
};

struct PairwiseTest {
  std::string group_a;
  std::string group_b;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  stats::MannWhitneyResult result;
};

struct SubgroupReport {
  std::string attribute;
  std::map<std::string, HeatmapGrid> grids;
  std::map<std::string, GroupSummary> overall;
  std::vector<PairwiseTest> tests;
  std::size_t excluded_sessions = 0;  // sessions without the attribute
};

// Splits sessions by a questionnaire attribute; ratings compared are those of
// the scenario type the bin measures belong to.
SubgroupReport SubgroupCompare(const ResponseTable& table,
                               const std::string& attribute, const BinSpec& x,
                               const BinSpec& y);

using TraitScores = std::map<std::string, std::optional<double>>;

// Reverse-coded items map x -> max + min - x; a trait is the mean of its
// items and missing if any item is unanswered.
std::map<std::string, TraitScores> ScoreTraits(
    const QuestionnaireSchema& schema,
    const std::map<std::string, Answers>& submissions);

// Converts exported text answers back to typed answers using the schema.
std::map<std::string, Answers> SubmissionsFromAttributes(
    const QuestionnaireSchema& schema, const SessionAttributes& attributes);

}  // namespace fairceptron

#endif  // FAIRCEPTRON_ANALYSIS_H_
