#include <doctest.h>
#include <httplib.h>

#include <thread>
#include <unistd.h>

#include "hapticaffect/error.hpp"
#include "hapticaffect/service.hpp"
#include "hapticaffect/session_log.hpp"

using namespace hapticaffect;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

class FixedTransport final : public ChatTransport {
 public:
  explicit FixedTransport(std::string reply) : reply_(std::move(reply)) {}
  std::string complete(const ChatRequest&) override { return reply_; }

 private:
  std::string reply_;
};

AppConfig test_config() {
  AppConfig c = AppConfig::defaults();
  c.log_dir = std::filesystem::temp_directory_path() / ("hapticaffect-svc-" + std::to_string(::getpid()));
  return c;
}

// Service on an ephemeral port, served from a background thread.
struct Served {
  explicit Served(std::shared_ptr<AudioDevice> device, std::shared_ptr<ChatTransport> transport = nullptr)
      : service(test_config(), std::move(device), std::move(transport)), http(service) {
    port = http.bind("127.0.0.1", 0);
    thread = std::thread([this] { http.listen(); });
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    for (int i = 0; i < 200 && !client->Get("/health"); ++i) std::this_thread::sleep_for(5ms);
  }
  ~Served() {
    http.stop();
    thread.join();
    std::filesystem::remove_all(service.config().log_dir);
  }

  httplib::Result post(const std::string& path, const json& body) {
    return client->Post(path, body.dump(), "application/json");
  }

  SpeakService service;
  HttpService http;
  int port = 0;
  std::thread thread;
  std::unique_ptr<httplib::Client> client;
};

}  // namespace

TEST_CASE("base64 round trip") {
  for (std::size_t n = 0; n < 40; ++n) {
    std::vector<std::uint8_t> bytes(n);
    for (std::size_t i = 0; i < n; ++i) bytes[i] = static_cast<std::uint8_t>(i * 37 + 11);
    const std::string enc = base64_encode(bytes);
    CHECK(enc.size() == 4 * ((n + 2) / 3));
    CHECK(base64_decode(enc) == bytes);
  }
  CHECK(base64_encode(std::vector<std::uint8_t>{'M', 'a'}) == "TWE=");
  CHECK_THROWS_AS(base64_decode("abc"), InputError);
}

TEST_CASE("speak request parsing") {
  const SpeakRequest r = parse_speak_request(json{{"text", "hi"}, {"estimator", "lexicon"}, {"render", "both"}});
  CHECK(r.text == "hi");
  CHECK(r.estimator == EstimatorBackend::Lexicon);
  CHECK(r.render == RenderMode::Both);
  CHECK_THROWS_AS(parse_speak_request(json{{"text", ""}}), InputError);
  CHECK_THROWS_AS(parse_speak_request(json{{"text", 3}}), InputError);
  CHECK_THROWS_AS(parse_speak_request(json{{"text", "a"}, {"render", "loud"}}), InputError);
  CHECK_THROWS_AS(parse_speak_request(json{{"text", "a"}, {"estimator", "oracle"}}), InputError);
}

TEST_CASE("speak service renders deterministic WAVs") {
  SpeakService svc(test_config(), nullptr);
  const SpeakRequest req{"It was a calm day today.", EstimatorBackend::Lexicon, RenderMode::Wav};
  const SpeakResponse a = svc.speak(req);
  const SpeakResponse b = svc.speak(req);
  REQUIRE(a.wav_base64);
  CHECK(*a.wav_base64 == *b.wav_base64);
  const WaveBuffer w = decode_wav(base64_decode(*a.wav_base64));
  CHECK(w.size() == static_cast<std::size_t>(std::llround(a.params.duration_s * 44100)));
  CHECK(a.duration_s == doctest::Approx(a.params.duration_s));
  CHECK_FALSE(a.playback_id);
  CHECK(parse_timestamp(a.synthesized_at) <= now_utc());
  CHECK_THROWS_AS(svc.speak({"hi", std::nullopt, RenderMode::Play}), DeviceError);
}

TEST_CASE("playback ids are single use and expire") {
  auto dev = std::make_shared<NullAudioDevice>();
  SpeakService svc(test_config(), dev);
  const SpeakResponse r = svc.speak({"hello", std::nullopt, RenderMode::Play});
  REQUIRE(r.playback_id);
  CHECK_FALSE(r.wav_base64);
  CHECK(svc.start(*r.playback_id) == SpeakService::StartResult::Started);
  CHECK(svc.start(*r.playback_id) == SpeakService::StartResult::AlreadyStarted);
  CHECK(svc.start("nope") == SpeakService::StartResult::Unknown);

  svc.set_playback_ttl(0s);
  const SpeakResponse late = svc.speak({"hello", std::nullopt, RenderMode::Play});
  CHECK(svc.start(*late.playback_id) == SpeakService::StartResult::Unknown);
}

TEST_CASE("HTTP speak endpoint") {
  Served s(std::make_shared<NullAudioDevice>());

  SUBCASE("health") {
    auto res = s.client->Get("/health");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["status"] == "ok");
  }

  SUBCASE("wav render with the lexicon backend") {
    auto res = s.post("/speak", {{"text", "Every day is just so much fun!"}, {"estimator", "lexicon"}, {"render", "wav"}});
    REQUIRE(res);
    CHECK(res->status == 200);
    const json body = json::parse(res->body);
    const double dur = body["params"]["duration_s"];
    const WaveBuffer w = decode_wav(base64_decode(body["wav"].get<std::string>()));
    CHECK(w.size() == static_cast<std::size_t>(std::llround(dur * 44100)));
    CHECK(body["affect"]["pleasure"].get<double>() > 50.0);
    CHECK(body["timing"].contains("synthesized_at"));
    CHECK_FALSE(body.contains("playback_id"));

    auto again = s.post("/speak", {{"text", "Every day is just so much fun!"}, {"estimator", "lexicon"}});
    CHECK(json::parse(again->body)["wav"] == body["wav"]);
  }

  SUBCASE("bad requests") {
    auto empty = s.post("/speak", {{"text", ""}});
    REQUIRE(empty);
    CHECK(empty->status == 400);
    CHECK(json::parse(empty->body)["error"] == "input");
    auto junk = s.client->Post("/speak", "{not json", "application/json");
    CHECK(junk->status == 400);
  }

  SUBCASE("start signal") {
    auto res = s.post("/speak", {{"text", "hello"}, {"render", "play"}});
    REQUIRE(res);
    REQUIRE(res->status == 200);
    const std::string id = json::parse(res->body)["playback_id"];
    auto first = s.client->Post("/speak/" + id + "/start");
    CHECK(first->status == 204);
    auto second = s.client->Post("/speak/" + id + "/start");
    CHECK(second->status == 204);
    CHECK(s.client->Post("/speak/does-not-exist/start")->status == 404);

    std::optional<PlaybackReport> report;
    for (int i = 0; i < 200 && !report; ++i) {
      report = s.service.playback_report(id);
      std::this_thread::sleep_for(5ms);
    }
    REQUIRE(report);
    CHECK(report->status == PlaybackStatus::Played);
  }
}

TEST_CASE("HTTP estimator failure is a 502 with its cause") {
  Served s(nullptr, std::make_shared<FixedTransport>("I refuse"));
  auto res = s.post("/speak", {{"text", "hello"}, {"estimator", "llm"}});
  REQUIRE(res);
  CHECK(res->status == 502);
  const json body = json::parse(res->body);
  CHECK(body["cause"] == "parse");
  CHECK(body["attempts"] == 3);
}

TEST_CASE("HTTP play without a device is a 503") {
  Served s(nullptr);
  auto res = s.post("/speak", {{"text", "hello"}, {"render", "play"}});
  REQUIRE(res);
  CHECK(res->status == 503);
  CHECK(s.post("/speak", {{"text", "hello"}, {"render", "wav"}})->status == 200);
}

TEST_CASE("double start plays once") {
  auto dev = std::make_shared<NullAudioDevice>();
  Served s(dev);
  auto res = s.post("/speak", {{"text", "hello"}, {"render", "play"}});
  const std::string id = json::parse(res->body)["playback_id"];
  std::vector<std::thread> clients;
  for (int i = 0; i < 4; ++i)
    clients.emplace_back([&] {
      httplib::Client c("127.0.0.1", s.port);
      auto r = c.Post("/speak/" + id + "/start");
      CHECK((r && r->status == 204));
    });
  for (auto& t : clients) t.join();
  for (int i = 0; i < 200 && !s.service.playback_report(id); ++i) std::this_thread::sleep_for(5ms);
  std::this_thread::sleep_for(20ms);
  CHECK(dev->streams_opened() == 1);
}

TEST_CASE("HTTP session endpoints") {
  Served s(std::make_shared<NullAudioDevice>());
  auto created = s.post("/session", {{"participant_index", 1}, {"seed", 7}});
  REQUIRE(created);
  CHECK(created->status == 201);
  const json state = json::parse(created->body);
  CHECK(state["participant_id"] == "P02");
  CHECK(state["phase"] == "idle");
  CHECK(state["condition"] == "without-vibro");
  CHECK(s.post("/session", {{"participant_index", 1}})->status == 409);
  CHECK(s.post("/session", {{"participant_index", -1}})->status == 400);
  CHECK(s.client->Get("/session/P99/state")->status == 404);

  CHECK(s.post("/session/P02/sam", {{"valence", 5}, {"arousal", 5}})->status == 409);
  auto adv = s.post("/session/P02/advance", json::object());
  REQUIRE(adv);
  CHECK(adv->status == 200);
  const json trial = json::parse(adv->body)["trial"];
  CHECK(trial["condition"] == "without-vibro");
  CHECK(trial["vibration"].is_null());
  CHECK(json::parse(s.client->Get("/session/P02/state")->body)["current"]["text"].is_string());

  CHECK(s.post("/session/P02/sam", {{"valence", 12}, {"arousal", 5}})->status == 400);
  auto sam = s.post("/session/P02/sam", {{"valence", 3}, {"arousal", 8}, {"nonce", "a"}});
  CHECK(sam->status == 200);
  auto dup = s.post("/session/P02/sam", {{"valence", 3}, {"arousal", 8}, {"nonce", "a"}});
  CHECK(dup->status == 200);
  CHECK(json::parse(dup->body)["trial"] == json::parse(sam->body)["trial"]);
  CHECK(json::parse(dup->body)["state"]["trials_finished"] == 1);

  for (int i = 1; i < 10; ++i) {
    s.post("/session/P02/advance", json::object());
    s.post("/session/P02/sam", {{"valence", 5}, {"arousal", 5}});
  }
  CHECK(json::parse(s.client->Get("/session/P02/state")->body)["phase"] == "awaiting-ios");
  CHECK(s.post("/session/P02/ios", {{"ios", 0}})->status == 400);
  auto ios = s.post("/session/P02/ios", {{"ios", 4}, {"nonce", "x"}});
  CHECK(ios->status == 200);
  CHECK(s.post("/session/P02/ios", {{"ios", 4}, {"nonce", "x"}})->status == 200);

  auto vib = s.post("/session/P02/advance", json::object());
  CHECK(json::parse(vib->body)["trial"]["vibration"].is_object());

  auto csv = s.client->Get("/session/P02/summary");
  REQUIRE(csv);
  CHECK(csv->status == 200);
  CHECK(csv->body.rfind("section,condition,phrase_id,metric,value\n", 0) == 0);
  CHECK(csv->body.find("condition,without-vibro,,trials,10\n") != std::string::npos);
  CHECK(csv->body.find("condition,without-vibro,,ios_count,1\n") != std::string::npos);
}
