#include "hapticaffect/service.hpp"

#include <openssl/evp.h>

#include <random>

#include "hapticaffect/error.hpp"
#include "hapticaffect/session_log.hpp"

namespace hapticaffect {

const char* to_string(RenderMode m) noexcept {
  switch (m) {
    case RenderMode::Play: return "play";
    case RenderMode::Wav: return "wav";
    case RenderMode::Both: return "both";
  }
  return "wav";
}

RenderMode parse_render_mode(std::string_view name) {
  if (name == "play") return RenderMode::Play;
  if (name == "wav") return RenderMode::Wav;
  if (name == "both") return RenderMode::Both;
  throw InputError("unknown render mode '" + std::string(name) + "' (expected play, wav or both)");
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw InputError("base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw InputError("invalid base64");
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

nlohmann::json to_json(const SpeakResponse& r) {
  nlohmann::json j = {
      {"affect", r.affect},
      {"params", r.params},
      {"timing", {{"duration_s", r.duration_s}, {"synthesized_at", r.synthesized_at}, {"render_ms", r.render_ms}}},
  };
  if (r.wav_base64) j["wav"] = *r.wav_base64;
  if (r.playback_id) j["playback_id"] = *r.playback_id;
  return j;
}

SpeakRequest parse_speak_request(const nlohmann::json& body) {
  if (!body.is_object()) throw InputError("request body must be a JSON object");
  SpeakRequest req;
  const auto text = body.find("text");
  if (text == body.end() || !text->is_string()) throw InputError("'text' must be a string");
  req.text = text->get<std::string>();
  if (req.text.find_first_not_of(" \t\r\n") == std::string::npos) throw InputError("'text' is empty");
  if (auto e = body.find("estimator"); e != body.end() && !e->is_null()) {
    if (!e->is_string()) throw InputError("'estimator' must be a string");
    req.estimator = parse_estimator_backend(e->get<std::string>());
  }
  if (auto r = body.find("render"); r != body.end() && !r->is_null()) {
    if (!r->is_string()) throw InputError("'render' must be a string");
    req.render = parse_render_mode(r->get<std::string>());
  }
  return req;
}

namespace {

std::string random_token() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

}  // namespace

SpeakService::SpeakService(AppConfig config, std::shared_ptr<AudioDevice> device,
                           std::shared_ptr<ChatTransport> transport)
    : config_(std::move(config)) {
  config_.validate();
  lexicon_ = std::make_shared<const Lexicon>(Lexicon::load(config_.lexicon_path));
  prompt_ = std::filesystem::exists(config_.prompt_path) ? load_prompt_spec(config_.prompt_path)
                                                        : default_prompt_spec();

  EstimatorConfig lex_cfg = config_.estimator;
  lex_cfg.backend = EstimatorBackend::Lexicon;
  lexicon_estimator_ = std::make_shared<const AffectEstimator>(lex_cfg, lexicon_);

  EstimatorConfig llm_cfg = config_.estimator;
  llm_cfg.backend = EstimatorBackend::RemoteLlm;
  remote_estimator_ = std::make_shared<const AffectEstimator>(llm_cfg, lexicon_, std::move(transport), prompt_);

  if (device) player_ = std::make_shared<Player>(std::move(device));
  phrases_ = std::filesystem::exists(config_.phrases_path) ? load_phrases(config_.phrases_path) : evaluation_phrases();
}

SpeakService::~SpeakService() = default;

const AffectEstimator& SpeakService::estimator_for(EstimatorBackend backend) const {
  return backend == EstimatorBackend::Lexicon ? *lexicon_estimator_ : *remote_estimator_;
}

SpeakResponse SpeakService::speak(const SpeakRequest& request) {
  if (request.text.find_first_not_of(" \t\r\n") == std::string::npos) throw InputError("text is empty");
  const bool wants_play = request.render != RenderMode::Wav;
  if (wants_play && !player_) throw DeviceError("no audio device configured");

  const auto backend = request.estimator.value_or(config_.estimator.backend);
  SpeakResponse resp;
  resp.affect = estimator_for(backend).estimate(request.text);

  const auto t0 = SteadyClock::now();
  resp.params = map_affect(resp.affect, request.text);
  WaveBuffer buf = render_stimulus(resp.params, config_.envelope(), config_.sample_rate);
  resp.duration_s = buf.duration_s();
  resp.synthesized_at = format_timestamp(now_utc());
  if (request.render != RenderMode::Play) resp.wav_base64 = base64_encode(encode_wav(buf));
  resp.render_ms = std::chrono::duration<double, std::milli>(SteadyClock::now() - t0).count();

  if (wants_play) {
    const std::string id = random_token();
    StartSignal signal;
    auto report = player_->enqueue(std::move(buf), signal, id).share();
    std::lock_guard lock(mu_);
    const auto now = SteadyClock::now();
    purge_expired_locked(now);
    playbacks_.emplace(id, PendingPlayback{signal, report, now + ttl_});
    resp.playback_id = id;
  }
  return resp;
}

void SpeakService::purge_expired_locked(SteadyClock::time_point now) {
  std::erase_if(playbacks_, [&](const auto& kv) { return kv.second.expires_at <= now; });
}

SpeakService::StartResult SpeakService::start(std::string_view playback_id) {
  std::lock_guard lock(mu_);
  purge_expired_locked(SteadyClock::now());
  auto it = playbacks_.find(playback_id);
  if (it == playbacks_.end()) return StartResult::Unknown;
  return it->second.signal.fire() ? StartResult::Started : StartResult::AlreadyStarted;
}

std::optional<PlaybackReport> SpeakService::playback_report(std::string_view playback_id) {
  std::shared_future<PlaybackReport> fut;
  {
    std::lock_guard lock(mu_);
    auto it = playbacks_.find(playback_id);
    if (it == playbacks_.end()) return std::nullopt;
    fut = it->second.report;
  }
  if (fut.wait_for(std::chrono::seconds(0)) != std::future_status::ready) return std::nullopt;
  return fut.get();
}

std::shared_ptr<Session> SpeakService::create_session(std::size_t participant_index, std::uint64_t seed,
                                                      std::string participant_id) {
  SessionPlan plan = plan_session(participant_index, phrases_, seed, std::move(participant_id));
  for (char c : plan.participant_id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'))
      throw InputError("participant id may only contain letters, digits, '-' and '_'");

  std::lock_guard lock(mu_);
  if (sessions_.contains(plan.participant_id))
    throw StateError("session '" + plan.participant_id + "' already exists");

  Pipeline pipeline;
  pipeline.estimator = config_.estimator.backend == EstimatorBackend::Lexicon ? lexicon_estimator_ : remote_estimator_;
  pipeline.envelope = config_.envelope();
  pipeline.sample_rate = config_.sample_rate;
  pipeline.player = player_;

  std::filesystem::create_directories(config_.log_dir);
  auto log = std::make_shared<SessionLog>(config_.log_dir / ("session-" + plan.participant_id + ".jsonl"));
  const std::string id = plan.participant_id;
  auto session = std::make_shared<Session>(std::move(plan), phrases_, std::move(pipeline), std::move(log));
  sessions_.emplace(id, session);
  return session;
}

std::shared_ptr<Session> SpeakService::find_session(std::string_view id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

nlohmann::json session_state_json(const Session& session) {
  const SessionState st = session.state();
  const auto& plan = session.plan();
  nlohmann::json j = {
      {"participant_id", plan.participant_id},
      {"phase", to_string(st.phase)},
      {"condition_index", st.condition_index},
      {"condition", to_string(plan.condition_order[std::min<std::size_t>(st.condition_index, 1)])},
      {"phrase_position", st.phrase_position},
      {"trials_finished", st.trials_finished},
      {"trials_total", st.trials_total},
      {"plan", plan},
      {"scales", {{"sam_points", session.scales().sam_points}, {"ios_points", session.scales().ios_points}}},
  };
  if (st.current) {
    j["current"] = *st.current;
    j["current"]["text"] = find_phrase(session.phrases(), st.current->phrase_id).text;
  } else {
    j["current"] = nullptr;
  }
  return j;
}

}  // namespace hapticaffect
