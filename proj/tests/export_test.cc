#include <doctest.h>

#include "fairceptron/analysis.h"
#include "fairceptron/csv.h"
#include "fairceptron/errors.h"
#include "fairceptron/export.h"
#include "fairceptron/util.h"
#include "study_fixture.h"

namespace fairceptron {
namespace {

using nlohmann::json;

std::unique_ptr<Study> PopulatedStudy() {
  auto study = std::make_unique<Study>(
      testing::TestStudyConfig(), testing::DemoPoolPtr(), testing::Bfi10(),
      std::make_unique<MemoryEventStore>(), testing::TickingClock());
  for (int i = 0; i < 3; ++i) {
    const auto s = study->CreateSession();
    testing::RateAll(*study, s.id);
    if (i != 1) {
      auto answers = testing::AllThrees(study->questionnaire());
      answers["gender"] = i == 0 ? "female" : "prefer not to say";
      answers["ai_trust"] = 0.125;
      study->SubmitQuestionnaire(s.id, answers);
    }
  }
  return study;
}

TEST_CASE("empty study exports a header only") {
  Study study(testing::TestStudyConfig(), testing::DemoPoolPtr(), {},
              std::make_unique<MemoryEventStore>());
  const auto csv = study.Export(ExportFormat::kCsv, "secret");
  CHECK(csv ==
        "study_id,session_id,session_created_at,position_in_session,"
        "scenario_id,scenario_type,cluster,rating,answer_time_ms,uncertainty,"
        "ordering_utility,signed_representation,selection_utility,"
        "parity_difference\n");
  CHECK(study.Export(ExportFormat::kCsv, "secret", ExportTable::kQuestionnaire) ==
        "study_id,session_id,item_id,value\n");
  const auto j = json::parse(study.Export(ExportFormat::kJson, "secret"));
  CHECK(j["responses"].empty());
  CHECK(j["questionnaire"].empty());
}

TEST_CASE("one session gives twenty rows with the right measure columns") {
  Study study(testing::TestStudyConfig(), testing::DemoPoolPtr(), {},
              std::make_unique<MemoryEventStore>(), testing::TickingClock());
  const auto s = study.CreateSession();
  testing::RateAll(study, s.id);
  const auto rows = csv::Parse(study.Export(ExportFormat::kCsv, "secret"));
  REQUIRE(rows.size() == 21);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    REQUIRE(r.size() == 14);
    CHECK(r[0] == "test");
    CHECK(r[1] == s.id);
    CHECK(r[3] == std::to_string(i - 1));
    CHECK(r[4] == s.assignment[i - 1]);
    const bool ranking = r[5] == "ranking";
    CHECK(r[10].empty() == !ranking);
    CHECK(r[11].empty() == !ranking);
    CHECK(r[12].empty() == ranking);
    CHECK(r[13].empty() == ranking);
    CHECK(ParseTimestamp(r[2]).has_value());
  }
}

TEST_CASE("rows are ordered by session creation then position") {
  auto study = PopulatedStudy();
  const auto snapshot = study->Snapshot();
  const auto rows = ResponseRows(snapshot, study->pool());
  CHECK(rows.size() == 60);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i][1] == snapshot.sessions[i / 20].id);
    CHECK(rows[i][3] == std::to_string(i % 20));
  }
}

TEST_CASE("csv and json exports are field-equivalent") {
  auto study = PopulatedStudy();
  const auto csv_text = study->Export(ExportFormat::kCsv, "secret");
  const auto json_text = study->Export(ExportFormat::kJson, "secret");
  const auto csv_rows = csv::Parse(csv_text);
  const auto j = json::parse(json_text);
  REQUIRE(j["responses"].size() + 1 == csv_rows.size());
  for (std::size_t r = 0; r < j["responses"].size(); ++r) {
    const auto& o = j["responses"][r];
    for (std::size_t c = 0; c < kResponseColumns.size(); ++c) {
      const std::string column = kResponseColumns[c];
      CHECK(csv_rows[0][c] == column);
      const auto& cell = csv_rows[r + 1][c];
      const auto& v = o.at(column);
      if (v.is_null()) {
        CHECK(cell.empty());
      } else if (v.is_string()) {
        CHECK(cell == v.get<std::string>());
      } else {
        CHECK(ParseDouble(cell).value() == v.get<double>());
      }
    }
  }
  // Same tables through the analysis readers.
  const auto questionnaire =
      study->Export(ExportFormat::kCsv, "secret", ExportTable::kQuestionnaire);
  CHECK(ParseResponsesCsv(csv_text, questionnaire) == ParseExportJson(json_text));
}

TEST_CASE("questionnaire table") {
  auto study = PopulatedStudy();
  const auto rows = csv::Parse(
      study->Export(ExportFormat::kCsv, "secret", ExportTable::kQuestionnaire));
  // Two completed sessions with 13 items each.
  REQUIRE(rows.size() == 1 + 2 * 13);
  bool saw_quoted = false;
  for (const auto& r : rows) {
    REQUIRE(r.size() == 4);
    if (r[2] == "gender" && r[3] == "prefer not to say") saw_quoted = true;
    if (r[2] == "ai_trust") CHECK(r[3] == "0.125");
    if (r[2] == "bfi_01") CHECK(r[3] == "3");
  }
  CHECK(saw_quoted);
}

TEST_CASE("csv quoting round-trips awkward fields") {
  const csv::Row row = {"plain", "with,comma", "with \"quote\"", "multi\nline", ""};
  const auto text = csv::FormatRow(row) + csv::FormatRow({"a", "b", "c", "d", "e"});
  const auto parsed = csv::Parse(text);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0] == row);
  CHECK(csv::Parse("x,y\r\n1,2\r\n") == std::vector<csv::Row>{{"x", "y"}, {"1", "2"}});
  CHECK_THROWS_AS(csv::Parse("\"open"), ValidationError);
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(FormatDouble(0.1) == "0.1");
  CHECK(FormatDouble(1.0) == "1");
  CHECK(FormatDouble(900) == "900");
  CHECK(FormatDouble(0.16666666666666663) == "0.16666666666666663");
  CHECK(FormatOptional(std::nullopt).empty());
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.Normal() * 1e3;
    CHECK(ParseDouble(FormatDouble(v)).value() == v);
  }
  CHECK_FALSE(ParseDouble("1.5x").has_value());
  CHECK_FALSE(ParseInt("12.0").has_value());
}

TEST_CASE("timestamps") {
  const auto t = ParseTimestamp("2026-10-15T08:30:00.250Z");
  REQUIRE(t.has_value());
  CHECK(FormatTimestamp(*t) == "2026-10-15T08:30:00.250Z");
  CHECK_FALSE(ParseTimestamp("yesterday").has_value());
}

}  // namespace
}  // namespace fairceptron
