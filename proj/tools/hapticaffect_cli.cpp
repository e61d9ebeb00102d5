// hapticaffect command-line front end.
//
//   hapticaffect speak <text> [--estimator lexicon|llm] [--wav out.wav] [--play]
//   hapticaffect serve [--port N]
//   hapticaffect session run --participant <n> --phrases <file> [--seed k] [--simulate]
//   hapticaffect demo --phrases <file> [--wav-dir dir]
//   hapticaffect summarize <session.jsonl>
//
// Exit codes: 0 ok, 1 internal, 2 input, 3 config, 4 estimation, 5 I/O,
// 6 audio device, 7 state. Diagnostics go to stderr as one JSON object.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hapticaffect/config.hpp"
#include "hapticaffect/error.hpp"
#include "hapticaffect/service.hpp"
#include "hapticaffect/session_log.hpp"
#include "hapticaffect/session_runner.hpp"

namespace ha = hapticaffect;
using nlohmann::json;

namespace {

int exit_code(ha::ErrorKind kind) {
  switch (kind) {
    case ha::ErrorKind::Input:
    case ha::ErrorKind::Validation:
    case ha::ErrorKind::Parse: return 2;
    case ha::ErrorKind::Config: return 3;
    case ha::ErrorKind::Estimation: return 4;
    case ha::ErrorKind::Io: return 5;
    case ha::ErrorKind::Device: return 6;
    case ha::ErrorKind::State: return 7;
    case ha::ErrorKind::Aliasing: return 2;
  }
  return 1;
}

void report_error(std::string_view kind, const std::string& message, json extra = json::object()) {
  extra["error"] = kind;
  extra["message"] = message;
  std::cerr << extra.dump() << std::endl;
}

ha::AppConfig load_config(const std::string& path) {
  return path.empty() ? ha::AppConfig::defaults() : ha::AppConfig::load(path);
}

int run_speak(const ha::AppConfig& base, const std::string& text, const std::string& estimator,
              const std::string& wav_path, bool play) {
  ha::AppConfig config = base;
  if (!estimator.empty()) config.estimator.backend = ha::parse_estimator_backend(estimator);
  if (play && config.device == "none") throw ha::DeviceError("no audio device configured");

  ha::SpeakService service(config, play ? ha::make_audio_device(config.device) : nullptr);
  ha::SpeakRequest req;
  req.text = text;
  req.render = play ? (wav_path.empty() ? ha::RenderMode::Play : ha::RenderMode::Both) : ha::RenderMode::Wav;
  ha::SpeakResponse resp = service.speak(req);

  if (!wav_path.empty()) {
    const auto bytes = ha::base64_decode(*resp.wav_base64);
    ha::write_wav(ha::decode_wav(bytes), wav_path);
  }
  json out = ha::to_json(resp);
  out.erase("wav");
  if (play) {
    // No robot is attached on the command line: speech starts now.
    service.start(*resp.playback_id);
    for (int i = 0; i < 600; ++i) {
      if (auto report = service.playback_report(*resp.playback_id)) {
        out["playback"] = {{"status", ha::to_string(report->status)},
                           {"device", report->device},
                           {"start_offset_ms", report->start_offset.count()},
                           {"samples", report->samples_submitted}};
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  if (!wav_path.empty()) out["wav_path"] = wav_path;
  std::cout << out.dump(2) << std::endl;
  return 0;
}

int serve_forever(ha::SpeakService& service, const std::string& host, int port, const std::string& ui_dir,
                  const std::string& banner_extra = {}) {
  ha::HttpService http(service);
  if (!ui_dir.empty()) http.mount_ui(ui_dir);
  const int bound = http.bind(host, port);
  std::cout << "listening on http://" << host << ":" << bound << banner_extra << std::endl;
  http.listen();
  return 0;
}

int run_session(const ha::AppConfig& base, std::size_t participant, const std::string& phrases_path,
                std::uint64_t seed, bool simulate, const std::string& host, int port, const std::string& ui_dir) {
  ha::AppConfig config = base;
  if (!phrases_path.empty()) config.phrases_path = phrases_path;
  ha::load_phrases(config.phrases_path);  // fail early with a config error

  ha::SpeakService service(config, ha::make_audio_device(config.device));
  auto session = service.create_session(participant, seed);
  if (!simulate)
    return serve_forever(service, host, port, ui_dir, " session=" + session->plan().participant_id);

  auto participant_model = ha::make_seeded_participant(seed ^ (0x9E3779B97F4A7C15ULL * (participant + 1)));
  ha::run_to_completion(*session, *participant_model);
  std::cerr << json{{"session", session->plan().participant_id},
                    {"log", (config.log_dir / ("session-" + session->plan().participant_id + ".jsonl")).string()}}
                   .dump()
            << std::endl;
  std::cout << session->summary().to_csv();
  return 0;
}

int run_demo(const ha::AppConfig& base, const std::string& phrases_path, const std::string& wav_dir) {
  ha::AppConfig config = base;
  if (!phrases_path.empty()) config.phrases_path = phrases_path;
  const ha::PhraseSet phrases = ha::load_phrases(config.phrases_path);
  ha::SpeakService service(config, nullptr);

  if (!wav_dir.empty()) std::filesystem::create_directories(wav_dir);
  std::printf("%-4s %-50s %8s %8s %9s %7s %6s\n", "id", "text", "pleas%", "arous%", "freq_Hz", "amp", "dur_s");
  for (const auto& p : phrases) {
    ha::SpeakRequest req{p.text, std::nullopt, ha::RenderMode::Wav};
    const ha::SpeakResponse r = service.speak(req);
    std::printf("%-4d %-50.50s %8.1f %8.1f %9.2f %7d %6.2f\n", p.id, p.text.c_str(), r.affect.pleasure,
                r.affect.arousal, r.params.frequency_hz, r.params.amplitude, r.params.duration_s);
    if (!wav_dir.empty()) {
      const auto path = std::filesystem::path(wav_dir) / ("phrase-" + std::to_string(p.id) + ".wav");
      ha::write_wav(ha::decode_wav(ha::base64_decode(*r.wav_base64)), path);
    }
  }
  return 0;
}

int run_summarize(const std::string& log_path) {
  const ha::LogContents log = ha::replay_log(log_path);
  if (log.truncated_tail) report_error("warning", "ignored a truncated final record in " + log_path);
  std::cout << ha::summarize(log.trials, log.ios).to_csv();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affect-driven vibrotactile stimulus renderer"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "Key-value config file")->check(CLI::ExistingFile);

  std::string speak_text, speak_estimator, speak_wav;
  bool speak_play = false;
  auto* speak = app.add_subcommand("speak", "Estimate, map and render one utterance");
  speak->add_option("text", speak_text, "Utterance text")->required();
  speak->add_option("--estimator", speak_estimator, "lexicon or llm")->check(CLI::IsMember({"lexicon", "llm"}));
  speak->add_option("--wav", speak_wav, "Write the stimulus to this WAV file");
  speak->add_flag("--play", speak_play, "Play the stimulus on the configured device");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string ui_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 = ephemeral)");
  serve->add_option("--ui-dir", ui_dir, "Static experiment UI directory served at /ui")->check(CLI::ExistingDirectory);

  std::size_t participant = 0;
  std::string phrases_path;
  std::uint64_t seed = 0;
  bool simulate = false;
  auto* session = app.add_subcommand("session", "Experiment sessions");
  session->require_subcommand(1);
  auto* session_run = session->add_subcommand("run", "Run one participant's session");
  session_run->add_option("--participant", participant, "Participant index (0-based)")->required();
  session_run->add_option("--phrases", phrases_path, "Phrase set JSON")->required();
  session_run->add_option("--seed", seed, "Randomization seed");
  session_run->add_flag("--simulate", simulate, "Answer ratings with a seeded simulated participant");
  session_run->add_option("--host", host, "Bind address");
  session_run->add_option("--port", port, "Port (0 = ephemeral)");
  session_run->add_option("--ui-dir", ui_dir, "Static experiment UI directory")->check(CLI::ExistingDirectory);

  std::string demo_phrases, demo_wav_dir;
  auto* demo = app.add_subcommand("demo", "Render every phrase of a phrase set");
  demo->add_option("--phrases", demo_phrases, "Phrase set JSON")->required();
  demo->add_option("--wav-dir", demo_wav_dir, "Also write phrase-<id>.wav files here");

  std::string log_path;
  auto* summarize = app.add_subcommand("summarize", "Summarize a session log as CSV");
  summarize->add_option("log", log_path, "Session JSON-lines log")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report_error("usage", e.what());
    return 2;
  }

  try {
    const ha::AppConfig config = load_config(config_path);
    if (*speak) return run_speak(config, speak_text, speak_estimator, speak_wav, speak_play);
    if (*serve) {
      ha::SpeakService service(config, ha::make_audio_device(config.device));
      return serve_forever(service, host, port, ui_dir);
    }
    if (*session_run) return run_session(config, participant, phrases_path, seed, simulate, host, port, ui_dir);
    if (*demo) return run_demo(config, demo_phrases, demo_wav_dir);
    if (*summarize) return run_summarize(log_path);
  } catch (const ha::EstimationError& e) {
    report_error("estimation", e.what(), {{"cause", ha::to_string(e.cause())}, {"attempts", e.attempts()}});
    return 4;
  } catch (const ha::Error& e) {
    report_error(ha::to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return 1;
}
