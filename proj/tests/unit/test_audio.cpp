#include <doctest.h>

#include <thread>
#include <unistd.h>

#include "hapticaffect/audio.hpp"
#include "hapticaffect/error.hpp"

using namespace hapticaffect;
using namespace std::chrono_literals;

namespace {

WaveBuffer constant(std::int16_t value, std::size_t n) {
  WaveBuffer w;
  w.samples.assign(n, value);
  return w;
}

}  // namespace

TEST_CASE("start signal is a one-shot latch") {
  StartSignal s;
  CHECK_FALSE(s.fired());
  CHECK_FALSE(s.wait_until(SteadyClock::now() + 5ms));
  StartSignal copy = s;
  CHECK(copy.fire());
  CHECK_FALSE(s.fire());
  CHECK(s.fired());
  const auto t = s.fired_at();
  REQUIRE(t);
  s.fire();
  CHECK(*s.fired_at() == *t);
  CHECK(s.wait_until(SteadyClock::now()));
}

TEST_CASE("playback starts within 20 ms of the signal") {
  auto dev = std::make_shared<NullAudioDevice>();
  Player player(dev);
  for (int i = 0; i < 5; ++i) {
    StartSignal sig;
    auto fut = player.enqueue(constant(100, 4410), sig, "p" + std::to_string(i));
    std::this_thread::sleep_for(30ms);
    CHECK(dev->samples().size() == static_cast<std::size_t>(i) * 4410);
    sig.fire();
    const PlaybackReport r = fut.get();
    CHECK(r.status == PlaybackStatus::Played);
    CHECK(r.id == "p" + std::to_string(i));
    CHECK(r.device == "null");
    CHECK(r.simulated);
    CHECK(r.samples_submitted == 4410);
    CHECK(r.start_offset.count() >= 0.0);
    CHECK(r.start_offset.count() < 20.0);
  }
}

TEST_CASE("firing with nothing queued produces no output") {
  auto dev = std::make_shared<NullAudioDevice>();
  Player player(dev);
  StartSignal sig;
  sig.fire();
  std::this_thread::sleep_for(20ms);
  CHECK(dev->streams_opened() == 0);
  CHECK(dev->chunks().empty());
}

TEST_CASE("an unfired request expires without output") {
  auto dev = std::make_shared<NullAudioDevice>();
  Player player(dev, 120ms);
  const PlaybackReport r = player.enqueue(constant(1, 100), StartSignal{}).get();
  CHECK(r.status == PlaybackStatus::Expired);
  CHECK(r.samples_submitted == 0);
  CHECK(dev->samples().empty());
}

TEST_CASE("chunking covers the buffer exactly") {
  auto dev = std::make_shared<NullAudioDevice>();
  Player player(dev, 1s, 1024);
  StartSignal sig;
  sig.fire();
  WaveBuffer w = constant(0, 5000);
  for (std::size_t i = 0; i < w.size(); ++i) w.samples[i] = static_cast<std::int16_t>(i);
  const PlaybackReport r = play(player, w, sig);
  CHECK(r.audio_duration_s == doctest::Approx(5000.0 / 44100));
  const auto chunks = dev->chunks();
  REQUIRE(chunks.size() == 5);
  CHECK(chunks.back().size == 5000 - 4 * 1024);
  CHECK(dev->samples() == w.samples);
}

TEST_CASE("concurrent playbacks are FIFO and never interleave") {
  auto dev = std::make_shared<NullAudioDevice>(true);
  Player player(dev, 5s, 256);
  constexpr int kCount = 4;
  std::vector<StartSignal> signals(kCount);
  std::vector<std::future<PlaybackReport>> futures;
  for (int i = 0; i < kCount; ++i) futures.push_back(player.enqueue(constant(static_cast<std::int16_t>(i + 1), 2205), signals[i]));
  // Fire in reverse from several threads.
  std::vector<std::thread> firers;
  for (int i = kCount - 1; i >= 0; --i) firers.emplace_back([&, i] { signals[i].fire(); });
  for (auto& t : firers) t.join();
  for (auto& f : futures) CHECK(f.get().status == PlaybackStatus::Played);

  const auto samples = dev->samples();
  REQUIRE(samples.size() == kCount * 2205);
  for (int i = 0; i < kCount; ++i)
    for (std::size_t k = 0; k < 2205; ++k) REQUIRE(samples[i * 2205 + k] == i + 1);
  std::size_t last_stream = 0;
  for (const auto& c : dev->chunks()) {
    CHECK(c.stream >= last_stream);
    last_stream = c.stream;
  }
  CHECK(dev->streams_opened() == kCount);
}

TEST_CASE("player cancels queued work on shutdown") {
  auto dev = std::make_shared<NullAudioDevice>();
  std::future<PlaybackReport> a, b;
  {
    Player player(dev, 10s);
    a = player.enqueue(constant(1, 10), StartSignal{});
    b = player.enqueue(constant(2, 10), StartSignal{});
  }
  CHECK(a.get().status == PlaybackStatus::Cancelled);
  CHECK(b.get().status == PlaybackStatus::Cancelled);
  CHECK(dev->samples().empty());
}

TEST_CASE("device factory") {
  CHECK(make_audio_device("null")->name() == "null");
  CHECK(make_audio_device("none") == nullptr);
  CHECK_THROWS_AS(make_audio_device("alsa:nope"), DeviceError);
  CHECK_THROWS_AS(Player(nullptr), DeviceError);
}

TEST_CASE("pipe device feeds an external command") {
  const auto out = std::filesystem::temp_directory_path() / ("hapticaffect-pipe-" + std::to_string(::getpid()));
  auto dev = make_audio_device("pipe:cat > " + out.string());
  REQUIRE(dev);
  Player player(dev);
  StartSignal sig;
  sig.fire();
  const PlaybackReport r = play(player, constant(0x0102, 3000), sig);
  CHECK(r.status == PlaybackStatus::Played);
  CHECK(std::filesystem::file_size(out) == 6000);
  std::filesystem::remove(out);
}
