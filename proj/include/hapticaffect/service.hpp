#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hapticaffect/audio.hpp"
#include "hapticaffect/config.hpp"
#include "hapticaffect/estimator.hpp"
#include "hapticaffect/session_runner.hpp"

namespace hapticaffect {

enum class RenderMode { Play, Wav, Both };

const char* to_string(RenderMode m) noexcept;
RenderMode parse_render_mode(std::string_view name);

struct SpeakRequest {
  std::string text;
  std::optional<EstimatorBackend> estimator;
  RenderMode render = RenderMode::Wav;
};

struct SpeakResponse {
  AffectScore affect;
  VibrationParams params;
  std::optional<std::string> wav_base64;
  std::optional<std::string> playback_id;
  double duration_s = 0.0;
  std::string synthesized_at;
  double render_ms = 0.0;  // map + synthesize + encode, estimator excluded
};

nlohmann::json to_json(const SpeakResponse& r);
SpeakRequest parse_speak_request(const nlohmann::json& body);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Transport-free core of the HTTP service: the speak pipeline, pending
/// playbacks keyed by opaque ids, and live experiment sessions.
class SpeakService {
 public:
  /// `device` may be null, in which case render modes that play fail with
  /// DeviceError. `transport` overrides the HTTP client of the llm backend.
  SpeakService(AppConfig config, std::shared_ptr<AudioDevice> device,
               std::shared_ptr<ChatTransport> transport = nullptr);
  ~SpeakService();

  SpeakResponse speak(const SpeakRequest& request);

  enum class StartResult { Started, AlreadyStarted, Unknown };

  /// Fires the start signal of a queued playback. Ids expire after
  /// playback_ttl() from creation.
  StartResult start(std::string_view playback_id);

  std::shared_ptr<Session> create_session(std::size_t participant_index, std::uint64_t seed,
                                          std::string participant_id = {});
  std::shared_ptr<Session> find_session(std::string_view id) const;

  /// Report of a finished playback, if the id is known and done.
  std::optional<PlaybackReport> playback_report(std::string_view playback_id);

  const AppConfig& config() const noexcept { return config_; }
  bool has_player() const noexcept { return player_ != nullptr; }
  std::chrono::seconds playback_ttl() const noexcept { return ttl_; }
  void set_playback_ttl(std::chrono::seconds ttl) noexcept { ttl_ = ttl; }

 private:
  struct PendingPlayback {
    StartSignal signal;
    std::shared_future<PlaybackReport> report;
    SteadyClock::time_point expires_at;
  };

  const AffectEstimator& estimator_for(EstimatorBackend backend) const;
  void purge_expired_locked(SteadyClock::time_point now);

  AppConfig config_;
  std::shared_ptr<const Lexicon> lexicon_;
  PromptSpec prompt_;
  std::shared_ptr<const AffectEstimator> lexicon_estimator_;
  std::shared_ptr<const AffectEstimator> remote_estimator_;
  std::shared_ptr<Player> player_;
  PhraseSet phrases_;
  std::chrono::seconds ttl_{60};

  mutable std::mutex mu_;
  std::map<std::string, PendingPlayback, std::less<>> playbacks_;
  std::map<std::string, std::shared_ptr<Session>, std::less<>> sessions_;
};

/// HTTP/1.1 JSON front end over a SpeakService.
///
///   POST /speak                    {text, estimator?, render?}
///   POST /speak/{id}/start         -> 204 | 404
///   GET  /health
///   POST /session                  {participant_index, seed?, participant_id?}
///   GET  /session/{id}/state
///   POST /session/{id}/advance
///   POST /session/{id}/sam         {valence, arousal, nonce?}
///   POST /session/{id}/ios         {ios, nonce?}
///   GET  /session/{id}/summary     (CSV)
class HttpService {
 public:
  explicit HttpService(SpeakService& service);
  ~HttpService();

  /// Binds `host:port`; port 0 picks an ephemeral port. Returns the port.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  void listen();
  void stop();

  /// Optional static directory served at /ui/.
  void mount_ui(const std::filesystem::path& dir);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

nlohmann::json session_state_json(const Session& session);

}  // namespace hapticaffect
