#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include <doctest.h>

#include "fairceptron/analysis.h"
#include "fairceptron/csv.h"
#include "fairceptron/errors.h"
#include "fairceptron/export.h"
#include "fairceptron/simulate.h"
#include "study_fixture.h"
#include "test_util.h"

namespace fairceptron {
namespace {

ResponseRow RankingRow(const std::string& session, int position, double ou,
                       double sr, double rating) {
  ResponseRow row;
  row.study_id = "t";
  row.session_id = session;
  row.position_in_session = position;
  row.scenario_id = "r" + std::to_string(position);
  row.scenario_type = ScenarioType::kRanking;
  row.rating = rating;
  row.answer_time_ms = 1000 + position;
  row.uncertainty = 0.1 * position;
  row.measures.ordering_utility = ou;
  row.measures.signed_representation = sr;
  return row;
}

const BinSpec kOu = BinSpec::Uniform(Measure::kOrderingUtility, 10);
const BinSpec kSr = BinSpec::Uniform(Measure::kSignedRepresentation, 4);

std::string HeaderLine() {
  return csv::FormatRow({kResponseColumns.begin(), kResponseColumns.end()});
}

TEST_CASE("bin conventions") {
  const auto spec = BinSpec{Measure::kOrderingUtility, {0, 0.1, 0.2}};
  CHECK(spec.BinOf(0.1) == 1);
  CHECK(spec.BinOf(0.0) == 0);
  CHECK(spec.BinOf(0.2) == 1);
  CHECK_FALSE(spec.BinOf(0.2000001).has_value());
  CHECK_FALSE(spec.BinOf(-0.1).has_value());
  CHECK_FALSE(spec.BinOf(std::nan("")).has_value());
  CHECK(kOu.BinOf(0.7) == 7);
  CHECK(kOu.BinOf(1.0) == 9);
  CHECK(kSr.edges == std::vector<double>{-1, -0.5, 0, 0.5, 1});

  CHECK_THROWS_AS((BinSpec{Measure::kOrderingUtility, {0}}).Validate(), ValidationError);
  CHECK_THROWS_AS((BinSpec{Measure::kOrderingUtility, {0, 0.5, 0.5}}).Validate(),
                  ValidationError);
}

TEST_CASE("two rows in adjacent bins") {
  ResponseTable table;
  table.rows = {RankingRow("s", 0, 0.05, 0.1, 0.3), RankingRow("s", 1, 0.15, 0.1, 0.6)};
  const auto grid = BinByMeasures(table, kOu, kSr);
  CHECK(grid.count(2, 0) == 1);
  CHECK(grid.count(2, 1) == 1);
  CHECK(grid.count.sum() == 2);
  CHECK(grid.mean(2, 0) == 0.3);
  CHECK(grid.stddev(2, 0) == 0.0);
  CHECK(grid.Missing(0, 0));
  CHECK(std::isnan(grid.mean(0, 0)));
}

TEST_CASE("cell statistics") {
  ResponseTable table;
  for (int i = 0; i < 4; ++i) {
    table.rows.push_back(RankingRow("s", i, 0.95, 0.9, 0.2 * (i + 1)));
  }
  const auto grid = BinByMeasures(table, kOu, kSr);
  CHECK(grid.count(3, 9) == 4);
  CHECK(grid.mean(3, 9) == doctest::Approx(0.5));
  // Sample std of {0.2, 0.4, 0.6, 0.8}.
  CHECK(grid.stddev(3, 9) == doctest::Approx(std::sqrt(0.2 / 3)));
  CHECK(grid.median_answer_time_ms(3, 9) == 1001.5);
  CHECK(grid.median_uncertainty(3, 9) == doctest::Approx(0.15));
}

TEST_CASE("out-of-range rows are counted and mass is conserved") {
  ResponseTable table;
  table.rows = {RankingRow("s", 0, 0.5, 0.0, 0.5), RankingRow("s", 1, 0.5, 0.0, 0.5)};
  const auto narrow = BinSpec::Uniform(Measure::kOrderingUtility, 0.6, 1.0, 4);
  auto grid = BinByMeasures(table, narrow, kSr);
  CHECK(grid.out_of_range == 2);
  CHECK(grid.count.sum() == 0);

  // Classification rows are not part of a ranking grid.
  ResponseRow other;
  other.session_id = "s";
  other.scenario_id = "c1";
  other.scenario_type = ScenarioType::kClassification;
  other.measures.selection_utility = 1;
  other.measures.parity_difference = 0;
  table.rows.push_back(other);
  grid = BinByMeasures(table, kOu, kSr);
  CHECK(grid.rows_considered == 2);
  CHECK(grid.count.sum() + static_cast<int>(grid.out_of_range) == 2);
}

TEST_CASE("binning errors") {
  ResponseTable table;
  auto row = RankingRow("s", 0, 0.5, 0.0, 0.5);
  row.measures.signed_representation.reset();
  table.rows = {row};
  CHECK_THROWS_AS(BinByMeasures(table, kOu, kSr), DomainError);
  CHECK_THROWS_AS(
      BinByMeasures(table, kOu, BinSpec::Uniform(Measure::kParityDifference, 4)),
      DomainError);
}

TEST_CASE("cell means match a naive group-by on 100k random rows") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> unit(0, 1), sym(-1, 1.2);
  ResponseTable table;
  table.rows.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    table.rows.push_back(
        RankingRow("s" + std::to_string(i / 20), i % 20, unit(gen), sym(gen), unit(gen)));
  }
  const auto grid = BinByMeasures(table, kOu, kSr);

  std::map<std::pair<int, int>, std::pair<double, int>> naive;
  int outside = 0;
  for (const auto& r : table.rows) {
    const double x = *r.measures.ordering_utility, y = *r.measures.signed_representation;
    if (y > 1) {
      ++outside;
      continue;
    }
    const int bx = std::min(9, static_cast<int>(std::floor(x * 10)));
    int by = 0;
    while (by < 3 && y >= -1 + 0.5 * (by + 1)) ++by;
    auto& cell = naive[{by, bx}];
    cell.first += r.rating;
    cell.second += 1;
  }
  CHECK(static_cast<int>(grid.out_of_range) == outside);
  CHECK(grid.count.sum() + outside == 100000);
  for (int by = 0; by < 4; ++by) {
    for (int bx = 0; bx < 10; ++bx) {
      const auto it = naive.find({by, bx});
      REQUIRE(it != naive.end());
      CHECK(grid.count(by, bx) == it->second.second);
      CHECK(std::abs(grid.mean(by, bx) - it->second.first / it->second.second) <= 1e-12);
    }
  }
}

TEST_CASE("csv loading validates columns and rows") {
  const std::string good_row =
      "t,s1,2026-01-01T00:00:00.000Z,0,r1,ranking,3,0.5,900,0,0.8,0.25,,\n";
  auto table = ParseResponsesCsv(HeaderLine() + good_row);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].cluster == 3);
  CHECK(*table.rows[0].measures.ordering_utility == 0.8);
  CHECK_FALSE(table.rows[0].measures.selection_utility.has_value());

  auto expect = [](const std::string& text, const std::string& fragment) {
    try {
      ParseResponsesCsv(text);
      FAIL("expected validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
  };
  expect(HeaderLine() + good_row +
             "t,s1,2026-01-01T00:00:00.000Z,1,r2,ranking,3,1.5,900,0,0.8,0.25,,\n",
         "row 2: rating 1.5");
  expect("study_id,session_id\n", "missing column session_created_at");
  expect(HeaderLine() + good_row + good_row, "duplicate");
  expect(HeaderLine() +
             "t,s1,2026-01-01T00:00:00.000Z,0,r1,ranking,3,0.5,900,0,,,1,0\n",
         "do not match");
  expect(HeaderLine() + "t,s1,x,0,r1,ranking,3,abc,900,0,0.8,0.25,,\n",
         "column rating");
}

TEST_CASE("json loading names missing columns") {
  try {
    ParseExportJson(R"({"responses":[{"study_id":"t"}]})");
    FAIL("expected validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("session_id") != std::string::npos);
  }
  CHECK_THROWS_AS(ParseExportJson("{}"), ValidationError);
  CHECK_THROWS_AS(ParseExportJson("not json"), ValidationError);
}

TEST_CASE("service export loads from files in both formats") {
  Study study(testing::TestStudyConfig(), testing::DemoPoolPtr(), testing::Bfi10(),
              std::make_unique<MemoryEventStore>(), testing::TickingClock());
  const auto s = study.CreateSession();
  testing::RateAll(study, s.id);
  study.SubmitQuestionnaire(s.id, testing::AllThrees(study.questionnaire()));

  const auto dir = testing::TempDir("analysis_load");
  std::ofstream(dir / "e.csv") << study.Export(ExportFormat::kCsv, "secret");
  std::ofstream(dir / "q.csv") << study.Export(ExportFormat::kCsv, "secret",
                                               ExportTable::kQuestionnaire);
  std::ofstream(dir / "e.json") << study.Export(ExportFormat::kJson, "secret");
  const auto from_csv = LoadExport(dir / "e.csv", ExportFormat::kCsv, dir / "q.csv");
  const auto from_json = LoadExport(dir / "e.json", ExportFormat::kJson);
  CHECK(from_csv.rows.size() == 20);
  CHECK(from_csv == from_json);
  CHECK(from_csv.attributes.at(s.id).at("gender") == "female");
  CHECK(from_csv.Sessions() == std::vector<std::string>{s.id});
  CHECK_THROWS_AS(LoadExport(dir / "missing.csv", ExportFormat::kCsv), LoadError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("subgroup comparison") {
  ResponseTable table;
  // Group a rates ordering utility, group b its complement.
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int s = 0; s < 20; ++s) {
    const std::string id = "s" + std::to_string(s);
    const bool a = s % 2 == 0;
    for (int p = 0; p < 10; ++p) {
      const double ou = unit(gen);
      table.rows.push_back(RankingRow(id, p, ou, 0.2, a ? ou : 1 - ou));
    }
    if (s < 18) table.attributes[id]["gender"] = a ? "a" : "b";
  }
  const auto report = SubgroupCompare(table, "gender", kOu, kSr);
  CHECK(report.excluded_sessions == 2);
  REQUIRE(report.grids.size() == 2);
  CHECK(report.overall.at("a").count == 90);
  CHECK(report.overall.at("b").count == 90);
  REQUIRE(report.tests.size() == 1);
  CHECK(report.tests[0].group_a == "a");
  CHECK(report.tests[0].n_a == 90);
  CHECK_FALSE(report.tests[0].result.exact);

  // Opposite gradients across the populated columns of y bin 2.
  const auto& ga = report.grids.at("a");
  const auto& gb = report.grids.at("b");
  std::vector<double> ma, mb;
  for (int x = 0; x < 10; ++x) {
    if (ga.Missing(2, x) || gb.Missing(2, x)) continue;
    ma.push_back(ga.mean(2, x));
    mb.push_back(gb.mean(2, x));
  }
  REQUIRE(ma.size() >= 5);
  CHECK(std::is_sorted(ma.begin(), ma.end()));
  CHECK(std::is_sorted(mb.rbegin(), mb.rend()));
}

TEST_CASE("identical subgroups give identical grids") {
  ResponseTable table;
  for (int s = 0; s < 2; ++s) {
    const std::string id = "s" + std::to_string(s);
    for (int p = 0; p < 10; ++p) {
      table.rows.push_back(RankingRow(id, p, 0.1 * p, -0.5 + 0.1 * p, 0.05 * p));
    }
    table.attributes[id]["g"] = s == 0 ? "x" : "y";
  }
  const auto report = SubgroupCompare(table, "g", kOu, kSr);
  const auto diff = report.grids.at("x").mean - report.grids.at("y").mean;
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 10; ++x) {
      if (!report.grids.at("x").Missing(y, x)) CHECK(diff(y, x) == 0.0);
    }
  }
  CHECK(report.tests[0].result.p == doctest::Approx(1.0));

  table.attributes["s1"]["g"] = "x";
  CHECK_THROWS_AS(SubgroupCompare(table, "g", kOu, kSr), DomainError);
}

QuestionnaireSchema TwoItemSchema() {
  return QuestionnaireFromJson(nlohmann::json::parse(R"({
    "items": [
      {"id": "q1", "type": "likert", "min": 1, "max": 5, "reverse": true, "trait": "t"},
      {"id": "q2", "type": "likert", "min": 1, "max": 5, "trait": "t"}
    ]})"));
}

TEST_CASE("trait scoring") {
  const auto schema = TwoItemSchema();
  const auto scores = ScoreTraits(
      schema, {{"a", {{"q1", 2}, {"q2", 4}}}, {"b", {{"q1", 3}, {"q2", 3}}}, {"c", {{"q1", 2}}}});
  CHECK(scores.at("a").at("t") == 4.0);
  CHECK(scores.at("b").at("t") == 3.0);
  CHECK_FALSE(scores.at("c").at("t").has_value());
}

TEST_CASE("bfi-10 all threes and item order invariance") {
  const auto schema = testing::Bfi10();
  CHECK(schema.traits.size() == 5);
  Answers answers = testing::AllThrees(schema);
  auto scores = ScoreTraits(schema, {{"s", answers}});
  for (const auto& [trait, value] : scores.at("s")) CHECK(value == 3.0);

  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    Answers random_answers;
    for (const auto& item : schema.items) {
      if (item.type == ItemType::kLikert) random_answers[item.id] = 1 + gen() % 5;
    }
    auto shuffled = schema;
    std::shuffle(shuffled.items.begin(), shuffled.items.end(), gen);
    for (auto& [trait, ids] : shuffled.traits) std::shuffle(ids.begin(), ids.end(), gen);
    CHECK(ScoreTraits(schema, {{"s", random_answers}}) ==
          ScoreTraits(shuffled, {{"s", random_answers}}));
  }

  // Extraversion: item 1 reversed, item 6 normal.
  answers["bfi_01"] = 1;
  answers["bfi_06"] = 4;
  CHECK(ScoreTraits(schema, {{"s", answers}}).at("s").at("extraversion") == 4.5);
}

TEST_CASE("reverse coding on a non-integer scale is a schema error") {
  const auto j = nlohmann::json::parse(
      R"({"items": [{"id": "v", "type": "vas", "reverse": true}]})");
  CHECK_THROWS_AS(QuestionnaireFromJson(j), ValidationError);
}

TEST_CASE("submissions are recovered from exported text") {
  const auto schema = testing::Bfi10();
  SessionAttributes attributes = {
      {"s", {{"bfi_01", "2"}, {"gender", "male"}, {"ai_trust", "0.25"}, {"extra", "x"}}}};
  const auto submissions = SubmissionsFromAttributes(schema, attributes);
  const auto& a = submissions.at("s");
  CHECK(a.at("bfi_01") == 2);
  CHECK(a.at("gender") == "male");
  CHECK(a.at("ai_trust") == 0.25);
  CHECK_FALSE(a.count("extra"));
  attributes["s"]["bfi_02"] = "often";
  CHECK_THROWS_AS(SubmissionsFromAttributes(schema, attributes), ValidationError);
}

TEST_CASE("noise-free pipeline: bin means rise and stay inside their bins") {
  SimulationModel model;
  model.base.weights = {{Measure::kOrderingUtility, 1.0}};
  const auto study = SimulateRaters(*testing::DemoPoolPtr(), model, 136, 1);
  const auto table = ParseResponsesCsv(study.responses_csv);
  const auto grid = BinByMeasures(
      table, kOu, BinSpec::Uniform(Measure::kSignedRepresentation, 1));
  double previous = -1;
  for (int x = 0; x < 10; ++x) {
    if (grid.Missing(0, x)) continue;
    const double m = grid.mean(0, x);
    CHECK(m >= previous);
    CHECK(m >= kOu.edges[x]);
    CHECK(m <= kOu.edges[x + 1]);
    previous = m;
  }
}

}  // namespace
}  // namespace fairceptron
