#include "fairceptron/http_server.h"

#include <httplib.h>

#include "fairceptron/errors.h"
#include "fairceptron/pool_io.h"

namespace fairceptron {

using nlohmann::json;

int HttpStatusFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain:
    case ErrorKind::kValidation:
      return 400;
    case ErrorKind::kUnauthorized:
      return 401;
    case ErrorKind::kNotFound:
      return 404;
    case ErrorKind::kConflict:
      return 409;
    case ErrorKind::kUnavailable:
    case ErrorKind::kLoad:
      return 503;
  }
  return 500;
}

json ParticipantScenarioJson(const Scenario& scenario, int position) {
  return {{"id", scenario.id},
          {"type", ScenarioTypeName(scenario.type)},
          {"pattern", ScenarioPatternToJson(scenario)},
          {"qualifications", scenario.qualifications},
          {"position", position}};
}

namespace {

json SessionJson(const Study& study, const Session& session) {
  json scenarios = json::array();
  for (std::size_t i = 0; i < session.assignment.size(); ++i) {
    const Scenario* s = study.pool().Find(session.assignment[i]);
    scenarios.push_back(ParticipantScenarioJson(*s, static_cast<int>(i)));
  }
  return {{"session_id", session.id}, {"scenarios", std::move(scenarios)}};
}

void SendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs `handler`, translating library errors into JSON error responses.
template <typename Handler>
void Guarded(httplib::Response& res, Handler&& handler) {
  try {
    handler();
  } catch (const Error& e) {
    SendJson(res, HttpStatusFor(e.kind()),
             {{"error", ErrorKindName(e.kind())}, {"message", e.what()}});
  } catch (const json::exception& e) {
    SendJson(res, 400,
             {{"error", "validation_error"},
              {"message", std::string("malformed JSON body: ") + e.what()}});
  }
}

std::string BearerToken(const httplib::Request& req) {
  const std::string header = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (header.compare(0, kPrefix.size(), kPrefix) != 0) return {};
  return header.substr(kPrefix.size());
}

}  // namespace

struct HttpServer::Impl {
  Study& study;
  httplib::Server server;

  explicit Impl(Study& s) : study(s) {}
};

HttpServer::HttpServer(Study& study,
                       std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(study)) {
  auto& server = impl_->server;
  Study& st = impl_->study;

  server.Get("/api/healthz", [&st](const httplib::Request&,
                                   httplib::Response& res) {
    SendJson(res, 200,
             {{"status", "ok"}, {"pool_scenarios", st.pool().scenarios.size()}});
  });

  server.Get("/api/study", [&st](const httplib::Request&,
                                 httplib::Response& res) {
    const json schema = QuestionnaireToJson(st.questionnaire());
    json items = json::array();
    for (const auto& item : schema["items"]) {
      json copy = item;
      copy.erase("trait");
      copy.erase("reverse");
      items.push_back(std::move(copy));
    }
    SendJson(res, 200,
             {{"study_id", st.config().study_id},
              {"vas_left_label", st.config().vas_left_label},
              {"vas_right_label", st.config().vas_right_label},
              {"questionnaire", {{"items", std::move(items)}}}});
  });

  server.Post("/api/sessions", [&st](const httplib::Request&,
                                     httplib::Response& res) {
    Guarded(res, [&] { SendJson(res, 201, SessionJson(st, st.CreateSession())); });
  });

  server.Get(R"(/api/sessions/([^/]+))", [&st](const httplib::Request& req,
                                               httplib::Response& res) {
    Guarded(res, [&] {
      const Session s = st.GetSession(req.matches[1]);
      json body = SessionJson(st, s);
      body["status"] = SessionStatusName(s.status);
      body["cursor"] = s.cursor;
      SendJson(res, 200, body);
    });
  });

  server.Post(R"(/api/sessions/([^/]+)/responses)",
              [&st](const httplib::Request& req, httplib::Response& res) {
                Guarded(res, [&] {
                  const json body = json::parse(req.body);
                  // Any client-side rating/uncertainty fields are ignored.
                  const auto record = st.SubmitResponse(
                      req.matches[1], body.at("scenario_id").get<std::string>(),
                      TraceFromJson(body.at("trace")));
                  const Session s = st.GetSession(record.session_id);
                  SendJson(res, 201,
                           {{"session_id", record.session_id},
                            {"scenario_id", record.scenario_id},
                            {"position_in_session", record.position_in_session},
                            {"rating", record.rating},
                            {"answer_time_ms", record.answer_time_ms},
                            {"uncertainty", record.uncertainty},
                            {"status", SessionStatusName(s.status)}});
                });
              });

  server.Post(R"(/api/sessions/([^/]+)/questionnaire)",
              [&st](const httplib::Request& req, httplib::Response& res) {
                Guarded(res, [&] {
                  const json body = json::parse(req.body);
                  st.SubmitQuestionnaire(req.matches[1],
                                         body.at("answers").get<Answers>());
                  SendJson(res, 200, {{"status", "completed"}});
                });
              });

  server.Get("/api/export", [&st](const httplib::Request& req,
                                  httplib::Response& res) {
    Guarded(res, [&] {
      const std::string token = BearerToken(req);
      const ExportFormat format = ParseExportFormat(
          req.has_param("format") ? req.get_param_value("format") : "csv");
      const ExportTable table = ParseExportTable(
          req.has_param("table") ? req.get_param_value("table") : "responses");
      const std::string body = st.Export(format, token, table);
      res.status = 200;
      res.set_content(body, format == ExportFormat::kCsv
                                ? "text/csv; charset=utf-8"
                                : "application/json");
    });
  });

  if (static_dir) server.set_mount_point("/", static_dir->string());
}

HttpServer::~HttpServer() { Stop(); }

bool HttpServer::Listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

int HttpServer::BindToAnyPort(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool HttpServer::ListenAfterBind() { return impl_->server.listen_after_bind(); }

void HttpServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

void HttpServer::Stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace fairceptron
