#ifndef FAIRCEPTRON_EVENT_LOG_H_
#define FAIRCEPTRON_EVENT_LOG_H_

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace fairceptron {

struct Event {
  std::uint64_t sequence = 0;  // assigned by the store on append
  std::string type;  // session_created, response_recorded, ...
  nlohmann::json data;

  bool operator==(const Event&) const = default;
};

// Narrow persistence contract: ordered append and full scan. A document
// database backend only has to provide these two operations.
class EventStore {
 public:
  virtual ~EventStore() = default;

  // Durable before return. Assigns and returns the event's sequence number.
  virtual std::uint64_t Append(Event event) = 0;
  virtual std::vector<Event> Scan() const = 0;
};

class MemoryEventStore : public EventStore {
 public:
  std::uint64_t Append(Event event) override;
  std::vector<Event> Scan() const override { return events_; }

 private:
  std::vector<Event> events_;
};

struct LogLoadResult {
  std::vector<Event> events;
  std::vector<std::string> warnings;
  std::uintmax_t valid_bytes = 0;  // offset just past the last good line
};

// Reads a line-delimited JSON log. A malformed final line is dropped with a
// warning; a malformed earlier line throws LoadError naming its line number.
LogLoadResult LoadEvents(const std::filesystem::path& path);

// One JSON object per line in <data-dir>/events.jsonl, appended with flush
// and fsync. Opening truncates a torn trailing line so later appends start
// on a clean line boundary.
class FileEventLog : public EventStore {
 public:
  static constexpr const char* kFileName = "events.jsonl";

  // Throws LoadError if the directory cannot be created or written, or the
  // existing log has a corrupt non-trailing line.
  static std::unique_ptr<FileEventLog> Open(
      const std::filesystem::path& data_dir);

  ~FileEventLog() override;
  FileEventLog(const FileEventLog&) = delete;
  FileEventLog& operator=(const FileEventLog&) = delete;

  std::uint64_t Append(Event event) override;
  std::vector<Event> Scan() const override { return events_; }

  const std::vector<std::string>& load_warnings() const { return warnings_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  FileEventLog(std::filesystem::path path, std::FILE* file,
               LogLoadResult loaded);

  std::filesystem::path path_;
  std::FILE* file_;
  std::vector<Event> events_;
  std::vector<std::string> warnings_;
};

std::string EventToLine(const Event& event);

}  // namespace fairceptron

#endif  // FAIRCEPTRON_EVENT_LOG_H_
