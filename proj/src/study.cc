#include "fairceptron/study.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <utility>

#include "fairceptron/errors.h"
#include "fairceptron/export.h"
#include "fairceptron/pool_io.h"

namespace fairceptron {

using nlohmann::json;

namespace {

constexpr const char* kSessionCreated = "session_created";
constexpr const char* kResponseRecorded = "response_recorded";
constexpr const char* kQuestionnaireSubmitted = "questionnaire_submitted";
constexpr const char* kSessionCompleted = "session_completed";

std::string Hex64(std::uint64_t x) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kDigits[x & 0xf];
    x >>= 4;
  }
  return out;
}

std::uint64_t RandomDeviceU64() {
  static thread_local std::random_device device;
  return (static_cast<std::uint64_t>(device()) << 32) ^ device();
}

bool ConstantTimeEquals(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return false;
  unsigned char diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff |= static_cast<unsigned char>(a[i] ^ b[i]);
  }
  return diff == 0;
}

}  // namespace

void StudyConfig::Validate() const {
  if (study_id.empty()) throw ValidationError("study_id must not be empty");
  if (vas_left_label.empty() || vas_right_label.empty()) {
    throw ValidationError("VAS labels must not be empty");
  }
  if (export_token.empty()) {
    throw ValidationError("export_token must not be empty");
  }
}

StudyConfig ReadStudyConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open study config " + path.string());
  StudyConfig config;
  try {
    json j;
    in >> j;
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) -> std::filesystem::path {
      if (p.empty()) return {};
      const std::filesystem::path fp(p);
      return fp.is_absolute() ? fp : base / fp;
    };
    config.study_id = j.value("study_id", config.study_id);
    config.pool_path = resolve(j.at("pool_path").get<std::string>());
    config.questionnaire_path = resolve(j.value("questionnaire_path", ""));
    config.vas_left_label = j.value("vas_left_label", config.vas_left_label);
    config.vas_right_label = j.value("vas_right_label", config.vas_right_label);
    config.export_token = j.value("export_token", "");
    if (j.contains("session_seed") && !j.at("session_seed").is_null()) {
      config.session_seed = j.at("session_seed").get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return config;
}

void SliderTrace::Validate() const {
  if (events.empty()) {
    throw ValidationError("trace: events must be non-empty before commit");
  }
  double previous_t = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!std::isfinite(e.t) || e.t < 0) {
      throw ValidationError("trace: event " + std::to_string(i) +
                            " has a negative or non-finite time offset");
    }
    if (i > 0 && e.t < previous_t) {
      throw ValidationError("trace: event times must be non-decreasing (event " +
                            std::to_string(i) + ")");
    }
    if (!(e.value >= 0.0 && e.value <= 1.0)) {
      throw ValidationError("trace: event " + std::to_string(i) +
                            " value outside [0, 1]");
    }
    previous_t = e.t;
  }
  if (!std::isfinite(committed_at) || committed_at < events.back().t) {
    throw ValidationError("trace: committed_at precedes the last event");
  }
}

json TraceToJson(const SliderTrace& trace) {
  json events = json::array();
  for (const auto& e : trace.events) events.push_back({e.t, e.value});
  return {{"shown_at", trace.shown_at},
          {"events", std::move(events)},
          {"committed_at", trace.committed_at}};
}

SliderTrace TraceFromJson(const json& j) {
  SliderTrace trace;
  try {
    trace.shown_at = j.at("shown_at").get<double>();
    for (const auto& e : j.at("events")) {
      if (!e.is_array() || e.size() != 2) {
        throw ValidationError("trace: each event must be a [t, value] pair");
      }
      trace.events.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    trace.committed_at = j.at("committed_at").get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("trace: ") + e.what());
  }
  return trace;
}

double DeriveUncertainty(const SliderTrace& trace) {
  if (trace.events.empty()) {
    throw DomainError("uncertainty of an empty trace is undefined");
  }
  double total = 0;
  for (std::size_t i = 1; i < trace.events.size(); ++i) {
    total += std::abs(trace.events[i].value - trace.events[i - 1].value);
  }
  return total;
}

const char* SessionStatusName(SessionStatus status) {
  switch (status) {
    case SessionStatus::kActive:
      return "active";
    case SessionStatus::kRatingDone:
      return "rating_done";
    case SessionStatus::kCompleted:
      return "completed";
  }
  return "";
}

std::vector<std::string> AssignScenarios(const ScenarioPool& pool, Rng& rng) {
  std::vector<std::vector<std::string>> blocks;
  for (const ScenarioType type : pool.config.EnabledTypes()) {
    const auto it = pool.clusters.find(type);
    if (it == pool.clusters.end()) continue;
    std::vector<std::string> block;
    for (const auto& members : it->second) {
      block.push_back(members[rng.UniformIndex(members.size())]);
    }
    rng.Shuffle(std::span<std::string>(block));
    blocks.push_back(std::move(block));
  }
  if (blocks.size() == 2 && rng.Coin()) std::swap(blocks[0], blocks[1]);
  std::vector<std::string> assignment;
  for (auto& block : blocks) {
    assignment.insert(assignment.end(), block.begin(), block.end());
  }
  return assignment;
}

ExportFormat ParseExportFormat(const std::string& name) {
  if (name == "csv") return ExportFormat::kCsv;
  if (name == "json") return ExportFormat::kJson;
  throw ValidationError("unknown export format '" + name + "'");
}

ExportTable ParseExportTable(const std::string& name) {
  if (name == "responses") return ExportTable::kResponses;
  if (name == "questionnaire") return ExportTable::kQuestionnaire;
  throw ValidationError("unknown export table '" + name + "'");
}

Study::Study(StudyConfig config, std::shared_ptr<const ScenarioPool> pool,
             QuestionnaireSchema questionnaire,
             std::unique_ptr<EventStore> store, Clock clock)
    : config_(std::move(config)),
      pool_(std::move(pool)),
      questionnaire_(std::move(questionnaire)),
      store_(std::move(store)),
      clock_(std::move(clock)) {
  if (pool_ == nullptr) throw UnavailableError("scenario pool not loaded");
  config_.Validate();
  questionnaire_.Validate();
  for (const auto& s : pool_->scenarios) scenario_ids_.insert(s.id);
  for (const auto& event : store_->Scan()) {
    try {
      Apply(event);
    } catch (const Error& e) {
      throw LoadError("replaying event " + std::to_string(event.sequence) +
                      " (" + event.type + "): " + e.what());
    } catch (const json::exception& e) {
      throw LoadError("replaying event " + std::to_string(event.sequence) +
                      " (" + event.type + "): " + e.what());
    }
  }
}

std::unique_ptr<Study> Study::Open(StudyConfig config,
                                   std::unique_ptr<EventStore> store,
                                   Clock clock) {
  auto pool = std::make_shared<const ScenarioPool>(ReadPool(config.pool_path));
  QuestionnaireSchema questionnaire;
  if (!config.questionnaire_path.empty()) {
    questionnaire = ReadQuestionnaire(config.questionnaire_path);
  }
  return std::make_unique<Study>(std::move(config), std::move(pool),
                                 std::move(questionnaire), std::move(store),
                                 std::move(clock));
}

const Session& Study::FindLocked(const std::string& session_id) const {
  const auto it = index_.find(session_id);
  if (it == index_.end()) {
    throw NotFoundError("unknown session '" + session_id + "'");
  }
  return sessions_[it->second];
}

Session& Study::FindLocked(const std::string& session_id) {
  return const_cast<Session&>(std::as_const(*this).FindLocked(session_id));
}

void Study::Apply(const Event& event) {
  const json& d = event.data;
  if (event.type == kSessionCreated) {
    Session s;
    s.id = d.at("session_id").get<std::string>();
    s.sequence = d.at("sequence").get<std::uint64_t>();
    const auto created = ParseTimestamp(d.at("created_at").get<std::string>());
    if (!created) throw ValidationError("bad created_at timestamp");
    s.created_at = *created;
    s.assignment = d.at("assignment").get<std::vector<std::string>>();
    for (const auto& id : s.assignment) {
      if (!scenario_ids_.count(id)) {
        throw ValidationError("assignment names unknown scenario " + id);
      }
    }
    if (index_.count(s.id)) throw ConflictError("duplicate session " + s.id);
    index_.emplace(s.id, sessions_.size());
    sessions_.push_back(std::move(s));
    return;
  }

  Session& s = FindLocked(d.at("session_id").get<std::string>());
  if (event.type == kResponseRecorded) {
    ResponseRecord r;
    r.session_id = s.id;
    r.scenario_id = d.at("scenario_id").get<std::string>();
    r.position_in_session = d.at("position").get<int>();
    if (s.status != SessionStatus::kActive || s.cursor >= s.assignment.size() ||
        r.position_in_session != static_cast<int>(s.cursor) ||
        s.assignment[s.cursor] != r.scenario_id) {
      throw ConflictError("response out of order for session " + s.id);
    }
    r.trace = TraceFromJson(d.at("trace"));
    r.trace.Validate();
    r.rating = r.trace.events.back().value;
    r.answer_time_ms = r.trace.committed_at;
    r.uncertainty = DeriveUncertainty(r.trace);
    const auto received =
        ParseTimestamp(d.at("server_received_at").get<std::string>());
    if (!received) throw ValidationError("bad server_received_at timestamp");
    r.server_received_at = *received;
    s.responses.push_back(std::move(r));
    if (++s.cursor == s.assignment.size()) s.status = SessionStatus::kRatingDone;
  } else if (event.type == kQuestionnaireSubmitted) {
    if (s.status != SessionStatus::kRatingDone) {
      throw ConflictError("questionnaire before rating finished");
    }
    s.answers = d.at("answers").get<Answers>();
  } else if (event.type == kSessionCompleted) {
    s.status = SessionStatus::kCompleted;
  } else {
    throw ValidationError("unknown event type '" + event.type + "'");
  }
}

Session Study::CreateSession() {
  std::lock_guard lock(mu_);
  const std::uint64_t sequence = sessions_.size();
  Rng rng = config_.session_seed
                ? Rng::ForStream(*config_.session_seed, sequence)
                : Rng(RandomDeviceU64());
  const std::string id =
      config_.session_seed
          ? Hex64(rng.NextU64()) + Hex64(rng.NextU64())
          : Hex64(RandomDeviceU64()) + Hex64(RandomDeviceU64());
  auto assignment = AssignScenarios(*pool_, rng);

  Event event{0, kSessionCreated,
              {{"session_id", id},
               {"sequence", sequence},
               {"created_at", FormatTimestamp(clock_())},
               {"assignment", std::move(assignment)}}};
  event.sequence = store_->Append(event);
  Apply(event);
  return sessions_.back();
}

ResponseRecord Study::SubmitResponse(const std::string& session_id,
                                     const std::string& scenario_id,
                                     const SliderTrace& trace) {
  std::lock_guard lock(mu_);
  Session& s = FindLocked(session_id);
  if (s.status != SessionStatus::kActive) {
    const bool answered = std::any_of(
        s.responses.begin(), s.responses.end(),
        [&](const ResponseRecord& r) { return r.scenario_id == scenario_id; });
    throw ConflictError(answered ? "scenario " + scenario_id +
                                       " already answered"
                                 : "session " + session_id +
                                       " accepts no more ratings");
  }
  if (s.assignment[s.cursor] != scenario_id) {
    const bool answered =
        std::find(s.assignment.begin(), s.assignment.begin() + s.cursor,
                  scenario_id) != s.assignment.begin() + s.cursor;
    throw ConflictError(answered ? "scenario " + scenario_id +
                                       " already answered"
                                 : "expected scenario " +
                                       s.assignment[s.cursor] + ", got " +
                                       scenario_id);
  }
  trace.Validate();

  Event event{0, kResponseRecorded,
              {{"session_id", session_id},
               {"scenario_id", scenario_id},
               {"position", s.cursor},
               {"trace", TraceToJson(trace)},
               {"server_received_at", FormatTimestamp(clock_())}}};
  event.sequence = store_->Append(event);
  Apply(event);
  return s.responses.back();
}

void Study::SubmitQuestionnaire(const std::string& session_id,
                                const Answers& answers) {
  std::lock_guard lock(mu_);
  Session& s = FindLocked(session_id);
  if (s.status != SessionStatus::kRatingDone) {
    throw ConflictError("session " + session_id + " is " +
                        SessionStatusName(s.status) +
                        "; questionnaire needs rating_done");
  }
  questionnaire_.ValidateAnswers(answers);

  Event submitted{0, kQuestionnaireSubmitted,
                  {{"session_id", session_id}, {"answers", answers}}};
  submitted.sequence = store_->Append(submitted);
  Apply(submitted);
  Event completed{0, kSessionCompleted, {{"session_id", session_id}}};
  completed.sequence = store_->Append(completed);
  Apply(completed);
}

Session Study::GetSession(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  return FindLocked(session_id);
}

std::size_t Study::SessionCount() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

StudySnapshot Study::Snapshot() const {
  std::lock_guard lock(mu_);
  return {config_.study_id, sessions_};
}

std::string Study::Export(ExportFormat format, const std::string& token,
                          ExportTable table) const {
  if (!ConstantTimeEquals(token, config_.export_token)) {
    throw UnauthorizedError("invalid export token");
  }
  const StudySnapshot snapshot = Snapshot();
  if (format == ExportFormat::kJson) {
    return ExportJson(snapshot, *pool_).dump(1) + "\n";
  }
  return table == ExportTable::kResponses ? ResponsesCsv(snapshot, *pool_)
                                          : QuestionnaireCsv(snapshot);
}

}  // namespace fairceptron
