#ifndef FAIRCEPTRON_HTTP_SERVER_H_
#define FAIRCEPTRON_HTTP_SERVER_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "fairceptron/errors.h"
#include "fairceptron/study.h"

namespace fairceptron {

// Participant-facing payload for a scenario. Measures and cluster ids stay
// on the server.
nlohmann::json ParticipantScenarioJson(const Scenario& scenario, int position);

// JSON API over a Study:
//   POST /api/sessions
//   GET  /api/sessions/{id}
//   POST /api/sessions/{id}/responses
//   POST /api/sessions/{id}/questionnaire
//   GET  /api/export?format=csv|json[&table=responses|questionnaire]
//   GET  /api/study
//   GET  /api/healthz
// plus static files from `static_dir` under "/".
class HttpServer {
 public:
  explicit HttpServer(Study& study,
                      std::optional<std::filesystem::path> static_dir = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Blocks until Stop().
  bool Listen(const std::string& host, int port);
  // Returns the bound port, or -1.
  int BindToAnyPort(const std::string& host);
  bool ListenAfterBind();
  void WaitUntilReady() const;
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// HTTP status for an error category.
int HttpStatusFor(ErrorKind kind);

}  // namespace fairceptron

#endif  // FAIRCEPTRON_HTTP_SERVER_H_
