#include <map>
#include <set>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>
#include <doctest.h>

#include "fairceptron/errors.h"
#include "fairceptron/study.h"
#include "oracles.h"
#include "study_fixture.h"
#include "test_util.h"

namespace fairceptron {
namespace {

using testing::DemoPoolPtr;
using testing::TestStudyConfig;
using testing::TraceOf;

std::unique_ptr<Study> MemoryStudy(StudyConfig config = TestStudyConfig()) {
  return std::make_unique<Study>(config, DemoPoolPtr(), testing::Bfi10(),
                                 std::make_unique<MemoryEventStore>(),
                                 testing::TickingClock());
}

void CheckAssignmentCoversClusters(const ScenarioPool& pool,
                                   const std::vector<std::string>& assignment) {
  std::map<ScenarioType, std::multiset<int>> covered;
  for (const auto& id : assignment) {
    const auto* s = pool.Find(id);
    REQUIRE(s != nullptr);
    covered[s->type].insert(s->cluster);
  }
  for (const auto type : pool.config.EnabledTypes()) {
    std::multiset<int> expected;
    for (int c = 0; c < pool.config.cluster_count; ++c) expected.insert(c);
    CHECK(covered[type] == expected);
  }
}

TEST_CASE("uncertainty examples") {
  CHECK(DeriveUncertainty(TraceOf({0.3})) == 0.0);
  CHECK(DeriveUncertainty(TraceOf({0.0, 1.0, 0.0})) == doctest::Approx(2.0));
  CHECK(DeriveUncertainty(TraceOf({0.2, 0.6, 0.5})) == doctest::Approx(0.5));
  CHECK_THROWS_AS(DeriveUncertainty(SliderTrace{}), DomainError);
}

TEST_CASE("uncertainty equals the fold oracle on long random traces") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    SliderTrace trace;
    std::vector<double> values;
    for (int i = 0; i < 100; ++i) {
      values.push_back(rng.Uniform01());
      trace.events.push_back({10.0 * i, values.back()});
    }
    trace.committed_at = 1000;
    CHECK(DeriveUncertainty(trace) ==
          doctest::Approx(oracle::UncertaintyFold(values)).epsilon(1e-12));
  }
}

TEST_CASE("trace validation names the violated invariant") {
  auto expect = [](const SliderTrace& t, const std::string& fragment) {
    try {
      t.Validate();
      FAIL("expected validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
  };
  expect(SliderTrace{}, "non-empty");
  auto backwards = TraceOf({0.1, 0.2});
  backwards.events[1].t = 50;
  expect(backwards, "non-decreasing");
  expect(TraceOf({0.1, 1.2}), "value outside");
  expect(TraceOf({0.5}, 50), "committed_at");
  CHECK_NOTHROW(TraceOf({0.0, 1.0}).Validate());
}

TEST_CASE("trace json round-trip") {
  const auto trace = TraceOf({0.25, 0.75, 0.5}, 1234.5);
  CHECK(TraceFromJson(TraceToJson(trace)) == trace);
  CHECK_THROWS_AS(TraceFromJson({{"shown_at", 0}, {"events", {{1, 2, 3}}},
                                 {"committed_at", 5}}),
                  ValidationError);
  CHECK_THROWS_AS(TraceFromJson({{"events", nlohmann::json::array()}}),
                  ValidationError);
}

TEST_CASE("session creation gives 20 scenarios, one per cluster per type") {
  auto study = MemoryStudy();
  std::set<std::string> ids;
  for (int i = 0; i < 50; ++i) {
    const auto s = study->CreateSession();
    CHECK(s.assignment.size() == 20);
    CHECK(s.status == SessionStatus::kActive);
    CHECK(s.cursor == 0);
    CheckAssignmentCoversClusters(study->pool(), s.assignment);
    // Type blocks are contiguous.
    const auto first = study->pool().Find(s.assignment[0])->type;
    for (int p = 0; p < 20; ++p) {
      CHECK((study->pool().Find(s.assignment[p])->type == first) == (p < 10));
    }
    ids.insert(s.id);
  }
  CHECK(ids.size() == 50);
  CHECK(study->SessionCount() == 50);
}

TEST_CASE("single-scenario cluster gives a deterministic assignment") {
  GenerationConfig config;
  config.roster = testing::MakeRoster({2}, {1});
  config.classifications = false;
  config.cluster_count = 1;
  auto pool = generator::Generate(config);
  // Keep one scenario in the only cluster.
  pool.scenarios.resize(1);
  pool.clusters[ScenarioType::kRanking] = {{pool.scenarios[0].id}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    CHECK(AssignScenarios(pool, rng) ==
          std::vector<std::string>{pool.scenarios[0].id});
  }
}

TEST_CASE("block order and within-cluster draws are uniform") {
  const auto& pool = *DemoPoolPtr();
  // Choose the largest classification cluster and a ranking cluster.
  const auto& clusters = pool.clusters.at(ScenarioType::kClassification);
  std::size_t target = 0;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].size() > clusters[target].size()) target = c;
  }
  REQUIRE(clusters[target].size() >= 3);
  std::map<std::string, int> counts;
  int ranking_first = 0;
  const int trials = 10000;
  Rng rng(2026);
  for (int i = 0; i < trials; ++i) {
    const auto a = AssignScenarios(pool, rng);
    if (pool.Find(a[0])->type == ScenarioType::kRanking) ++ranking_first;
    for (const auto& id : a) {
      if (pool.Find(id)->type == ScenarioType::kClassification &&
          pool.Find(id)->cluster == static_cast<int>(target)) {
        ++counts[id];
      }
    }
  }
  const double expected =
      static_cast<double>(trials) / clusters[target].size();
  double chi2 = 0;
  for (const auto& id : clusters[target]) {
    chi2 += (counts[id] - expected) * (counts[id] - expected) / expected;
  }
  boost::math::chi_squared dist(clusters[target].size() - 1);
  CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.01);
  // Coin flip: within 4 standard deviations of 5000.
  CHECK(std::abs(ranking_first - trials / 2) < 200);
}

TEST_CASE("fixed seed reproduces ids and assignments across restarts") {
  auto config = TestStudyConfig();
  config.session_seed = 99;
  auto a = MemoryStudy(config);
  auto b = MemoryStudy(config);
  for (int i = 0; i < 5; ++i) {
    const auto sa = a->CreateSession();
    const auto sb = b->CreateSession();
    CHECK(sa.id == sb.id);
    CHECK(sa.assignment == sb.assignment);
  }
  config.session_seed = 100;
  auto c = MemoryStudy(config);
  CHECK(c->CreateSession().id != MemoryStudy(TestStudyConfig())->CreateSession().id);
}

TEST_CASE("responses derive rating, time and uncertainty") {
  auto study = MemoryStudy();
  const auto s = study->CreateSession();

  SliderTrace single;
  single.events = {{500, 0.8}};
  single.committed_at = 900;
  const auto r1 = study->SubmitResponse(s.id, s.assignment[0], single);
  CHECK(r1.rating == 0.8);
  CHECK(r1.answer_time_ms == 900);
  CHECK(r1.uncertainty == 0.0);
  CHECK(r1.position_in_session == 0);

  const auto r2 =
      study->SubmitResponse(s.id, s.assignment[1], TraceOf({0.2, 0.6, 0.5}));
  CHECK(r2.rating == 0.5);
  CHECK(r2.uncertainty == doctest::Approx(0.5));
  CHECK(r2.position_in_session == 1);
  CHECK(study->GetSession(s.id).cursor == 2);
}

TEST_CASE("response ordering and state errors") {
  auto study = MemoryStudy();
  const auto s = study->CreateSession();
  CHECK_THROWS_AS(study->SubmitResponse("nope", s.assignment[0], TraceOf({0.5})),
                  NotFoundError);
  CHECK_THROWS_AS(study->SubmitResponse(s.id, s.assignment[1], TraceOf({0.5})),
                  ConflictError);
  study->SubmitResponse(s.id, s.assignment[0], TraceOf({0.5}));

  const auto before = study->GetSession(s.id).responses.size();
  try {
    study->SubmitResponse(s.id, s.assignment[0], TraceOf({0.9}));
    FAIL("expected conflict");
  } catch (const ConflictError& e) {
    CHECK(std::string(e.what()).find("already answered") != std::string::npos);
  }
  CHECK(study->GetSession(s.id).responses.size() == before);

  CHECK_THROWS_AS(study->SubmitResponse(s.id, s.assignment[1], SliderTrace{}),
                  ValidationError);
  CHECK(study->GetSession(s.id).cursor == 1);

  CHECK_THROWS_AS(study->SubmitQuestionnaire(s.id, testing::AllThrees(study->questionnaire())),
                  ConflictError);
}

TEST_CASE("full session lifecycle") {
  auto study = MemoryStudy();
  const auto s = study->CreateSession();
  testing::RateAll(*study, s.id);
  auto after = study->GetSession(s.id);
  CHECK(after.status == SessionStatus::kRatingDone);
  CHECK(after.cursor == 20);
  CHECK_THROWS_AS(study->SubmitResponse(s.id, s.assignment[19], TraceOf({0.5})),
                  ConflictError);

  Answers bad = testing::AllThrees(study->questionnaire());
  bad["bfi_03"] = 7;
  bad["unknown_item"] = 1;
  try {
    study->SubmitQuestionnaire(s.id, bad);
    FAIL("expected validation error");
  } catch (const ValidationError& e) {
    const std::string message = e.what();
    CHECK(message.find("bfi_03") != std::string::npos);
    CHECK(message.find("unknown_item") != std::string::npos);
    CHECK(message.find("bfi_01") == std::string::npos);
  }
  CHECK(study->GetSession(s.id).status == SessionStatus::kRatingDone);

  study->SubmitQuestionnaire(s.id, testing::AllThrees(study->questionnaire()));
  after = study->GetSession(s.id);
  CHECK(after.status == SessionStatus::kCompleted);
  REQUIRE(after.answers.has_value());
  CHECK(after.answers->at("bfi_01") == 3);
  CHECK_THROWS_AS(study->SubmitQuestionnaire(s.id, {}), ConflictError);
  CHECK_THROWS_AS(study->SubmitResponse(s.id, s.assignment[0], TraceOf({0.5})),
                  ConflictError);
}

TEST_CASE("stored records satisfy the response invariants") {
  auto study = MemoryStudy();
  Rng rng(8);
  for (int i = 0; i < 5; ++i) {
    const auto s = study->CreateSession();
    for (const auto& id : s.assignment) {
      SliderTrace trace;
      const int events = 1 + static_cast<int>(rng.UniformIndex(6));
      for (int e = 0; e < events; ++e) trace.events.push_back({50.0 * e, rng.Uniform01()});
      trace.committed_at = 50.0 * events;
      study->SubmitResponse(s.id, id, trace);
    }
  }
  for (const auto& session : study->Snapshot().sessions) {
    for (const auto& r : session.responses) {
      CHECK(r.rating == r.trace.events.back().value);
      CHECK(r.uncertainty == DeriveUncertainty(r.trace));
      CHECK(r.rating >= 0.0);
      CHECK(r.rating <= 1.0);
    }
  }
}

TEST_CASE("file-backed study replays to identical state and export") {
  const auto dir = testing::TempDir("study_replay");
  std::string csv, json, questionnaire;
  std::vector<std::string> ids;
  {
    Study study(TestStudyConfig(), DemoPoolPtr(), testing::Bfi10(),
                FileEventLog::Open(dir), testing::TickingClock());
    for (int i = 0; i < 3; ++i) ids.push_back(study.CreateSession().id);
    testing::RateAll(study, ids[0]);
    study.SubmitQuestionnaire(ids[0], testing::AllThrees(study.questionnaire()));
    testing::RateAll(study, ids[1]);
    study.SubmitResponse(ids[2], study.GetSession(ids[2]).assignment[0],
                         TraceOf({0.1, 0.9, 0.3}));
    csv = study.Export(ExportFormat::kCsv, "secret");
    json = study.Export(ExportFormat::kJson, "secret");
    questionnaire = study.Export(ExportFormat::kCsv, "secret", ExportTable::kQuestionnaire);
  }
  Study restarted(TestStudyConfig(), DemoPoolPtr(), testing::Bfi10(),
                  FileEventLog::Open(dir), testing::TickingClock());
  CHECK(restarted.Export(ExportFormat::kCsv, "secret") == csv);
  CHECK(restarted.Export(ExportFormat::kJson, "secret") == json);
  CHECK(restarted.Export(ExportFormat::kCsv, "secret", ExportTable::kQuestionnaire) ==
        questionnaire);
  CHECK(restarted.GetSession(ids[0]).status == SessionStatus::kCompleted);
  CHECK(restarted.GetSession(ids[1]).status == SessionStatus::kRatingDone);
  CHECK(restarted.GetSession(ids[2]).cursor == 1);
  // The restarted study keeps going from where it stopped.
  const auto next = restarted.GetSession(ids[2]);
  CHECK_NOTHROW(restarted.SubmitResponse(ids[2], next.assignment[1], TraceOf({0.4})));
  std::filesystem::remove_all(dir);
}

TEST_CASE("replay rejects logs that reference unknown scenarios") {
  auto store = std::make_unique<MemoryEventStore>();
  store->Append({0, "session_created",
                 {{"session_id", "abc"},
                  {"sequence", 0},
                  {"created_at", "2026-01-01T00:00:00.000Z"},
                  {"assignment", {"r-not-there"}}}});
  CHECK_THROWS_AS(Study(TestStudyConfig(), DemoPoolPtr(), {}, std::move(store)),
                  LoadError);
}

TEST_CASE("export requires the token") {
  auto study = MemoryStudy();
  CHECK_THROWS_AS(study->Export(ExportFormat::kCsv, "wrong"), UnauthorizedError);
  CHECK_THROWS_AS(study->Export(ExportFormat::kCsv, ""), UnauthorizedError);
  CHECK_THROWS_AS(ParseExportFormat("xml"), ValidationError);
  CHECK_THROWS_AS(ParseExportTable("people"), ValidationError);
}

TEST_CASE("config validation and loading") {
  auto config = TestStudyConfig();
  config.export_token.clear();
  CHECK_THROWS_AS(config.Validate(), ValidationError);
  config = TestStudyConfig();
  config.vas_left_label.clear();
  CHECK_THROWS_AS(config.Validate(), ValidationError);
  CHECK_THROWS_AS(Study(TestStudyConfig(), nullptr, {}, std::make_unique<MemoryEventStore>()),
                  UnavailableError);

  const auto loaded = ReadStudyConfig(FAIRCEPTRON_DATA_DIR "/demo_study.json");
  CHECK(loaded.study_id == "demo");
  CHECK(loaded.pool_path == std::filesystem::path(FAIRCEPTRON_DATA_DIR) / "demo_pool.json");
  CHECK(loaded.vas_left_label == "very unfair");
  CHECK_FALSE(loaded.session_seed.has_value());
}

TEST_CASE("concurrent sessions keep per-session order") {
  auto study = MemoryStudy();
  std::vector<std::thread> workers;
  for (int w = 0; w < 8; ++w) {
    workers.emplace_back([&study] {
      for (int i = 0; i < 3; ++i) {
        const auto s = study->CreateSession();
        testing::RateAll(*study, s.id);
      }
    });
  }
  for (auto& t : workers) t.join();
  const auto snapshot = study->Snapshot();
  CHECK(snapshot.sessions.size() == 24);
  for (std::size_t i = 0; i < snapshot.sessions.size(); ++i) {
    const auto& s = snapshot.sessions[i];
    CHECK(s.sequence == i);
    CHECK(s.status == SessionStatus::kRatingDone);
    for (std::size_t p = 0; p < s.responses.size(); ++p) {
      CHECK(s.responses[p].position_in_session == static_cast<int>(p));
      CHECK(s.responses[p].scenario_id == s.assignment[p]);
    }
  }
}

}  // namespace
}  // namespace fairceptron
