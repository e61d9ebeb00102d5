#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "hapticaffect/affect.hpp"
#include "hapticaffect/lexicon.hpp"

namespace hapticaffect {

enum class EstimatorBackend { RemoteLlm, Lexicon };

const char* to_string(EstimatorBackend backend) noexcept;
EstimatorBackend parse_estimator_backend(std::string_view name);

struct EstimatorConfig {
  EstimatorBackend backend = EstimatorBackend::Lexicon;
  std::string model_name = "gpt-4o-mini";
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  int max_retries = 2;
  std::chrono::milliseconds timeout{10000};

  void validate() const;
};

struct ChatRequest {
  std::string model;
  std::string system_prompt;
  std::string user_message;
  double temperature = 0.0;
};

/// One round trip to a chat-completion service. Returns the assistant
/// message text; throws TransportError on network / HTTP / schema failure.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// OpenAI-style chat completions over HTTP(S). The API key is taken from the
/// `AFFECT_API_KEY` environment variable at construction time.
class HttpChatTransport final : public ChatTransport {
 public:
  HttpChatTransport(std::string endpoint_url, std::chrono::milliseconds timeout);

  std::string complete(const ChatRequest& request) override;

  static std::string request_body(const ChatRequest& request);
  static std::string extract_content(std::string_view response_body);

 private:
  std::string scheme_host_port_;
  std::string path_;
  std::chrono::milliseconds timeout_;
  std::string api_key_;
};

/// Front door for both backends. Holds only immutable state; one instance
/// may serve concurrent callers provided the transport is itself reentrant.
class AffectEstimator {
 public:
  AffectEstimator(EstimatorConfig config, std::shared_ptr<const Lexicon> lexicon,
                  std::shared_ptr<ChatTransport> transport = nullptr,
                  PromptSpec prompt = default_prompt_spec());

  /// Throws InputError for blank input and EstimationError once retries are
  /// exhausted on the remote backend.
  AffectScore estimate(std::string_view utterance) const;

  const EstimatorConfig& config() const noexcept { return config_; }
  const std::string& prompt() const noexcept { return prompt_; }

 private:
  AffectScore estimate_remote(std::string_view utterance) const;

  EstimatorConfig config_;
  std::shared_ptr<const Lexicon> lexicon_;
  std::shared_ptr<ChatTransport> transport_;
  std::string prompt_;
};

/// Convenience wrapper: lexicon backend uses the shipped lexicon, remote
/// backend builds an HttpChatTransport from the config.
AffectScore estimate_affect(std::string_view utterance, const EstimatorConfig& config);

}  // namespace hapticaffect
