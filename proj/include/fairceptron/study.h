#ifndef FAIRCEPTRON_STUDY_H_
#define FAIRCEPTRON_STUDY_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fairceptron/event_log.h"
#include "fairceptron/generator.h"
#include "fairceptron/questionnaire.h"
#include "fairceptron/rng.h"
#include "fairceptron/util.h"

namespace fairceptron {

struct StudyConfig {
  std::string study_id = "study";
  std::filesystem::path pool_path;
  std::filesystem::path questionnaire_path;  // empty: no questionnaire items
  std::string vas_left_label = "very unfair";
  std::string vas_right_label = "very fair";
  std::string export_token;
  // Set: assignments and session ids derive from (seed, session sequence).
  std::optional<std::uint64_t> session_seed;

  void Validate() const;
};

// Relative paths inside the file resolve against the file's directory.
StudyConfig ReadStudyConfig(const std::filesystem::path& path);

struct TraceEvent {
  double t = 0;      // ms since shown_at
  double value = 0;  // slider position in [0, 1]

  bool operator==(const TraceEvent&) const = default;
};

struct SliderTrace {
  double shown_at = 0;  // client epoch ms
  std::vector<TraceEvent> events;
  double committed_at = 0;  // ms since shown_at

  // Throws ValidationError naming the violated invariant.
  void Validate() const;

  bool operator==(const SliderTrace&) const = default;
};

nlohmann::json TraceToJson(const SliderTrace& trace);
SliderTrace TraceFromJson(const nlohmann::json& j);

// Total variation of the committed slider positions: sum of absolute first
// differences. A single event yields 0. Throws DomainError on an empty trace.
double DeriveUncertainty(const SliderTrace& trace);

struct ResponseRecord {
  std::string session_id;
  std::string scenario_id;
  int position_in_session = 0;
  double rating = 0;
  double answer_time_ms = 0;
  double uncertainty = 0;
  SliderTrace trace;
  Timestamp server_received_at;
};

enum class SessionStatus { kActive, kRatingDone, kCompleted };
const char* SessionStatusName(SessionStatus status);

struct Session {
  std::string id;
  std::uint64_t sequence = 0;  // creation order, 0-based
  Timestamp created_at;
  std::vector<std::string> assignment;
  std::size_t cursor = 0;
  SessionStatus status = SessionStatus::kActive;
  std::vector<ResponseRecord> responses;
  std::optional<Answers> answers;
};

// One uniformly drawn scenario per cluster of each type, each type block
// shuffled, block order decided by a fair coin.
std::vector<std::string> AssignScenarios(const ScenarioPool& pool, Rng& rng);

enum class ExportFormat { kCsv, kJson };
enum class ExportTable { kResponses, kQuestionnaire };

// Throws ValidationError for unknown names.
ExportFormat ParseExportFormat(const std::string& name);
ExportTable ParseExportTable(const std::string& name);

struct StudySnapshot {
  std::string study_id;
  std::vector<Session> sessions;  // creation order
};

// Study state machine. Every mutation is persisted as an event before it is
// applied, and the constructor rebuilds state by replaying the store, so a
// restarted study is indistinguishable from the one that wrote the log.
// All public methods are thread-safe.
class Study {
 public:
  using Clock = std::function<Timestamp()>;

  Study(StudyConfig config, std::shared_ptr<const ScenarioPool> pool,
        QuestionnaireSchema questionnaire, std::unique_ptr<EventStore> store,
        Clock clock = NowUtc);

  // Loads pool and questionnaire named by the config.
  static std::unique_ptr<Study> Open(StudyConfig config,
                                     std::unique_ptr<EventStore> store,
                                     Clock clock = NowUtc);

  Session CreateSession();
  ResponseRecord SubmitResponse(const std::string& session_id,
                                const std::string& scenario_id,
                                const SliderTrace& trace);
  void SubmitQuestionnaire(const std::string& session_id,
                           const Answers& answers);

  Session GetSession(const std::string& session_id) const;
  std::size_t SessionCount() const;
  StudySnapshot Snapshot() const;

  // Throws UnauthorizedError unless `token` equals the export token.
  std::string Export(ExportFormat format, const std::string& token,
                     ExportTable table = ExportTable::kResponses) const;

  const StudyConfig& config() const { return config_; }
  const ScenarioPool& pool() const { return *pool_; }
  const QuestionnaireSchema& questionnaire() const { return questionnaire_; }

 private:
  void Apply(const Event& event);
  Session& FindLocked(const std::string& session_id);
  const Session& FindLocked(const std::string& session_id) const;

  StudyConfig config_;
  std::shared_ptr<const ScenarioPool> pool_;
  QuestionnaireSchema questionnaire_;
  std::unique_ptr<EventStore> store_;
  Clock clock_;
  std::unordered_set<std::string> scenario_ids_;

  mutable std::mutex mu_;
  std::vector<Session> sessions_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace fairceptron

#endif  // FAIRCEPTRON_STUDY_H_
