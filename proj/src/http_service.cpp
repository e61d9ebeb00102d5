#include <httplib.h>

#include "hapticaffect/error.hpp"
#include "hapticaffect/service.hpp"
#include "hapticaffect/session_log.hpp"

namespace hapticaffect {

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view kind, const std::string& message,
                json extra = json::object()) {
  extra["error"] = kind;
  extra["message"] = message;
  send_json(res, status, extra);
}

json parse_body(const httplib::Request& req) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded()) throw InputError("request body is not valid JSON");
  if (!body.is_object()) throw InputError("request body must be a JSON object");
  return body;
}

int required_int(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_number_integer()) throw InputError(std::string("'") + key + "' must be an integer");
  return it->get<int>();
}

std::string optional_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return {};
  if (!it->is_string()) throw InputError(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

// Runs `fn`, translating library errors into HTTP statuses.
template <class Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const EstimationError& e) {
    send_error(res, 502, "estimation", e.what(), {{"cause", to_string(e.cause())}, {"attempts", e.attempts()}});
  } catch (const Error& e) {
    int status = 500;
    switch (e.kind()) {
      case ErrorKind::Input:
      case ErrorKind::Validation:
      case ErrorKind::Parse: status = 400; break;
      case ErrorKind::State: status = 409; break;
      case ErrorKind::Device: status = 503; break;
      case ErrorKind::Estimation: status = 502; break;
      default: status = 500; break;
    }
    send_error(res, status, to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal", e.what());
  }
}

}  // namespace

struct HttpService::Impl {
  explicit Impl(SpeakService& s) : service(s) { install_routes(); }

  std::shared_ptr<Session> session_or_404(const httplib::Request& req, httplib::Response& res) {
    auto session = service.find_session(req.matches[1].str());
    if (!session) send_error(res, 404, "not-found", "unknown session '" + req.matches[1].str() + "'");
    return session;
  }

  void install_routes() {
    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200,
                {{"status", "ok"},
                 {"kernels", kernels::active().name},
                 {"audio", service.has_player() ? service.config().device : "none"},
                 {"sample_rate", service.config().sample_rate}});
    });

    server.Post("/speak", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const SpeakRequest request = parse_speak_request(parse_body(req));
        send_json(res, 200, to_json(service.speak(request)));
      });
    });

    server.Post(R"(/speak/([^/]+)/start)", [this](const httplib::Request& req, httplib::Response& res) {
      if (service.start(req.matches[1].str()) == SpeakService::StartResult::Unknown) {
        send_error(res, 404, "not-found", "unknown or expired playback id");
        return;
      }
      res.status = 204;
    });

    server.Post("/session", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const json body = parse_body(req);
        const int index = required_int(body, "participant_index");
        if (index < 0) throw InputError("'participant_index' must be >= 0");
        std::uint64_t seed = 0;
        if (auto it = body.find("seed"); it != body.end()) {
          if (!it->is_number_unsigned()) throw InputError("'seed' must be a non-negative integer");
          seed = it->get<std::uint64_t>();
        }
        auto session = service.create_session(static_cast<std::size_t>(index), seed,
                                              optional_string(body, "participant_id"));
        send_json(res, 201, session_state_json(*session));
      });
    });

    server.Get(R"(/session/([^/]+)/state)", [this](const httplib::Request& req, httplib::Response& res) {
      if (auto s = session_or_404(req, res)) send_json(res, 200, session_state_json(*s));
    });

    server.Post(R"(/session/([^/]+)/advance)", [this](const httplib::Request& req, httplib::Response& res) {
      auto s = session_or_404(req, res);
      if (!s) return;
      guarded(res, [&] {
        const TrialRecord rec = s->advance();
        send_json(res, 200, {{"trial", rec}, {"state", session_state_json(*s)}});
      });
    });

    server.Post(R"(/session/([^/]+)/sam)", [this](const httplib::Request& req, httplib::Response& res) {
      auto s = session_or_404(req, res);
      if (!s) return;
      guarded(res, [&] {
        const json body = parse_body(req);
        const TrialRecord rec = s->submit_sam(required_int(body, "valence"), required_int(body, "arousal"),
                                              optional_string(body, "nonce"));
        send_json(res, 200, {{"trial", rec}, {"state", session_state_json(*s)}});
      });
    });

    server.Post(R"(/session/([^/]+)/ios)", [this](const httplib::Request& req, httplib::Response& res) {
      auto s = session_or_404(req, res);
      if (!s) return;
      guarded(res, [&] {
        const json body = parse_body(req);
        const IosRecord rec = s->submit_ios(required_int(body, "ios"), optional_string(body, "nonce"));
        send_json(res, 200, {{"ios", rec}, {"state", session_state_json(*s)}});
      });
    });

    server.Get(R"(/session/([^/]+)/summary)", [this](const httplib::Request& req, httplib::Response& res) {
      if (auto s = session_or_404(req, res)) {
        res.status = 200;
        res.set_content(s->summary().to_csv(), "text/csv; charset=utf-8");
      }
    });
  }

  SpeakService& service;
  httplib::Server server;
  std::string host = "127.0.0.1";
};

HttpService::HttpService(SpeakService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  impl_->host = host;
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind", host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) throw IoError("cannot bind", host + ":" + std::to_string(port));
  return port;
}

void HttpService::listen() { impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void HttpService::mount_ui(const std::filesystem::path& dir) {
  if (!impl_->server.set_mount_point("/ui", dir.string())) throw ConfigError("cannot serve UI from " + dir.string());
}

}  // namespace hapticaffect
