#include "fairceptron/event_log.h"

#include <unistd.h>

#include <fstream>
#include <sstream>

#include "fairceptron/errors.h"

namespace fairceptron {

using nlohmann::json;

namespace {

Event ParseEventLine(const std::string& line) {
  const json j = json::parse(line);
  Event event;
  event.sequence = j.at("seq").get<std::uint64_t>();
  event.type = j.at("type").get<std::string>();
  event.data = j.at("data");
  return event;
}

}  // namespace

std::string EventToLine(const Event& event) {
  return json{{"seq", event.sequence}, {"type", event.type},
              {"data", event.data}}
      .dump();
}

std::uint64_t MemoryEventStore::Append(Event event) {
  event.sequence = events_.size() + 1;
  events_.push_back(std::move(event));
  return events_.back().sequence;
}

LogLoadResult LoadEvents(const std::filesystem::path& path) {
  LogLoadResult result;
  std::ifstream in(path, std::ios::binary);
  if (!in) return result;
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();

  std::size_t offset = 0;
  std::size_t line_number = 0;
  while (offset < content.size()) {
    ++line_number;
    const std::size_t newline = content.find('\n', offset);
    const bool terminated = newline != std::string::npos;
    const std::size_t end = terminated ? newline : content.size();
    const std::string line = content.substr(offset, end - offset);
    const bool last = !terminated || end + 1 >= content.size();
    try {
      if (!terminated) throw std::runtime_error("missing line terminator");
      result.events.push_back(ParseEventLine(line));
    } catch (const std::exception& e) {
      if (last) {
        result.warnings.push_back(path.string() + ":" +
                                  std::to_string(line_number) +
                                  ": ignoring incomplete trailing event (" +
                                  e.what() + ")");
        break;
      }
      throw LoadError(path.string() + ":" + std::to_string(line_number) +
                      ": corrupt event line: " + e.what());
    }
    offset = end + 1;
    result.valid_bytes = offset;
  }
  return result;
}

std::unique_ptr<FileEventLog> FileEventLog::Open(
    const std::filesystem::path& data_dir) {
  std::error_code ec;
  std::filesystem::create_directories(data_dir, ec);
  if (ec) {
    throw LoadError("cannot create data directory " + data_dir.string() +
                    ": " + ec.message());
  }
  const auto path = data_dir / kFileName;
  LogLoadResult loaded = LoadEvents(path);
  if (std::filesystem::exists(path) &&
      std::filesystem::file_size(path) != loaded.valid_bytes) {
    std::filesystem::resize_file(path, loaded.valid_bytes, ec);
    if (ec) {
      throw LoadError("cannot truncate torn tail of " + path.string() + ": " +
                      ec.message());
    }
  }
  std::FILE* file = std::fopen(path.c_str(), "ab");
  if (file == nullptr) {
    throw LoadError("data directory " + data_dir.string() +
                    " is not writable");
  }
  return std::unique_ptr<FileEventLog>(
      new FileEventLog(path, file, std::move(loaded)));
}

FileEventLog::FileEventLog(std::filesystem::path path, std::FILE* file,
                           LogLoadResult loaded)
    : path_(std::move(path)),
      file_(file),
      events_(std::move(loaded.events)),
      warnings_(std::move(loaded.warnings)) {}

FileEventLog::~FileEventLog() {
  if (file_ != nullptr) std::fclose(file_);
}

std::uint64_t FileEventLog::Append(Event event) {
  event.sequence = events_.empty() ? 1 : events_.back().sequence + 1;
  const std::string line = EventToLine(event) + "\n";
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() ||
      std::fflush(file_) != 0 || ::fsync(::fileno(file_)) != 0) {
    throw UnavailableError("failed to append to event log " + path_.string());
  }
  events_.push_back(std::move(event));
  return events_.back().sequence;
}

}  // namespace fairceptron
