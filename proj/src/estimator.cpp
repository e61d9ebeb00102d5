#include "hapticaffect/estimator.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "hapticaffect/error.hpp"

namespace hapticaffect {

const char* to_string(EstimatorBackend backend) noexcept {
  return backend == EstimatorBackend::Lexicon ? "lexicon" : "llm";
}

EstimatorBackend parse_estimator_backend(std::string_view name) {
  if (name == "lexicon") return EstimatorBackend::Lexicon;
  if (name == "llm" || name == "remote-llm") return EstimatorBackend::RemoteLlm;
  throw InputError("unknown estimator '" + std::string(name) + "' (expected lexicon or llm)");
}

void EstimatorConfig::validate() const {
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (timeout.count() <= 0) throw ConfigError("timeout must be > 0");
  if (backend == EstimatorBackend::RemoteLlm && model_name.empty())
    throw ConfigError("model name is empty");
}

HttpChatTransport::HttpChatTransport(std::string endpoint_url, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  const auto scheme_end = endpoint_url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("endpoint url lacks a scheme: " + endpoint_url);
  const auto path_start = endpoint_url.find('/', scheme_end + 3);
  scheme_host_port_ = endpoint_url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : endpoint_url.substr(path_start);
  if (const char* key = std::getenv("AFFECT_API_KEY")) api_key_ = key;
}

std::string HttpChatTransport::request_body(const ChatRequest& request) {
  nlohmann::json body = {
      {"model", request.model},
      {"temperature", request.temperature},
      {"messages",
       nlohmann::json::array({
           {{"role", "system"}, {"content", request.system_prompt}},
           {{"role", "user"}, {"content", request.user_message}},
       })},
  };
  return body.dump();
}

std::string HttpChatTransport::extract_content(std::string_view response_body) {
  const auto doc = nlohmann::json::parse(response_body, nullptr, false);
  if (doc.is_discarded()) throw TransportError("chat response is not JSON");
  if (doc.contains("error")) {
    const auto& err = doc["error"];
    std::string msg = err.is_object() ? err.value("message", std::string("unknown")) : err.dump();
    throw TransportError("chat service error: " + msg);
  }
  try {
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw TransportError("chat response lacks choices[0].message.content");
  }
}

std::string HttpChatTransport::complete(const ChatRequest& request) {
  if (api_key_.empty()) throw TransportError("AFFECT_API_KEY is not set");

  httplib::Client client(scheme_host_port_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
  auto res = client.Post(path_, headers, request_body(request), "application/json");
  if (!res) throw TransportError("chat request failed: " + httplib::to_string(res.error()));
  if (res->status / 100 != 2)
    throw TransportError("chat request returned HTTP " + std::to_string(res->status));
  return extract_content(res->body);
}

AffectEstimator::AffectEstimator(EstimatorConfig config, std::shared_ptr<const Lexicon> lexicon,
                                 std::shared_ptr<ChatTransport> transport, PromptSpec prompt)
    : config_(std::move(config)),
      lexicon_(std::move(lexicon)),
      transport_(std::move(transport)) {
  config_.validate();
  if (config_.backend == EstimatorBackend::Lexicon) {
    if (!lexicon_) throw ConfigError("lexicon backend requires a lexicon");
  } else {
    prompt_ = build_prompt(prompt);
    if (!transport_)
      transport_ = std::make_shared<HttpChatTransport>(config_.endpoint_url, config_.timeout);
  }
}

AffectScore AffectEstimator::estimate(std::string_view utterance) const {
  if (utterance.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw InputError("utterance is empty");
  if (config_.backend == EstimatorBackend::Lexicon) return lexicon_estimate(utterance, *lexicon_);
  return estimate_remote(utterance);
}

AffectScore AffectEstimator::estimate_remote(std::string_view utterance) const {
  const ChatRequest request{config_.model_name, prompt_, std::string(utterance), 0.0};
  const int attempts = config_.max_retries + 1;

  EstimationCause last_cause = EstimationCause::Transport;
  std::string last_message;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    try {
      return parse_affect_response(transport_->complete(request));
    } catch (const TransportError& e) {
      last_cause = EstimationCause::Transport;
      last_message = e.what();
    } catch (const ParseError& e) {
      last_cause = EstimationCause::Parse;
      last_message = e.what();
    }
  }
  throw EstimationError(last_cause, attempts,
                        "estimation failed after " + std::to_string(attempts) +
                            " attempt(s), last " + to_string(last_cause) + " error: " + last_message);
}

AffectScore estimate_affect(std::string_view utterance, const EstimatorConfig& config) {
  if (config.backend == EstimatorBackend::Lexicon) {
    // Non-owning alias: the shipped lexicon lives for the whole program.
    std::shared_ptr<const Lexicon> lex(&shipped_lexicon(), [](const Lexicon*) {});
    return AffectEstimator(config, std::move(lex)).estimate(utterance);
  }
  return AffectEstimator(config, nullptr).estimate(utterance);
}

}  // namespace hapticaffect
