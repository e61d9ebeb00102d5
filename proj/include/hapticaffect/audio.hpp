#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "hapticaffect/synth.hpp"

namespace hapticaffect {

using SteadyClock = std::chrono::steady_clock;

/// Speech-onset event. Copies share state. Firing is a one-shot latch: the
/// first fire() records the time, later calls do nothing. A fired signal that
/// no playback waits on produces no output.
class StartSignal {
 public:
  StartSignal();

  /// Returns true for the call that actually fired the signal.
  bool fire();
  bool fired() const;
  std::optional<SteadyClock::time_point> fired_at() const;

  /// Blocks until fired or `deadline`; returns whether the signal fired.
  bool wait_until(SteadyClock::time_point deadline) const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

enum class PlaybackStatus { Played, Expired, Cancelled, DeviceFailure };

const char* to_string(PlaybackStatus s) noexcept;

struct PlaybackReport {
  std::string id;
  PlaybackStatus status = PlaybackStatus::Played;
  std::string device;
  bool simulated = false;
  /// First-sample submission time minus signal time.
  std::chrono::duration<double, std::milli> start_offset{0};
  std::size_t samples_submitted = 0;
  std::size_t underruns = 0;
  double audio_duration_s = 0.0;
  std::string error;
};

/// Output sink. Only the Player's worker thread calls open/write/close.
class AudioDevice {
 public:
  virtual ~AudioDevice() = default;

  virtual std::string_view name() const = 0;
  virtual bool simulated() const { return false; }
  virtual void open(int sample_rate) = 0;
  /// Returns true if the device reported an underrun for this chunk.
  virtual bool write(std::span<const std::int16_t> chunk) = 0;
  virtual void close() = 0;
};

/// In-memory device for tests and headless runs. Records every chunk with
/// the index of the open() call it belongs to.
class NullAudioDevice final : public AudioDevice {
 public:
  struct Chunk {
    std::size_t stream;
    std::size_t offset;
    std::size_t size;
  };

  explicit NullAudioDevice(bool pace_realtime = false)
      : pace_realtime_(pace_realtime) {}

  std::string_view name() const override { return "null"; }
  bool simulated() const override { return true; }
  void open(int sample_rate) override;
  bool write(std::span<const std::int16_t> chunk) override;
  void close() override;

  std::vector<Chunk> chunks() const;
  std::vector<std::int16_t> samples() const;
  std::size_t streams_opened() const;

 private:
  bool pace_realtime_;
  mutable std::mutex mu_;
  int sample_rate_ = 0;
  bool is_open_ = false;
  std::size_t streams_ = 0;
  std::size_t stream_offset_ = 0;
  std::vector<Chunk> chunks_;
  std::vector<std::int16_t> samples_;
};

/// Streams raw S16LE mono PCM into the stdin of an external player command,
/// e.g. `aplay -q -f S16_LE -c 1 -r {rate}`. `{rate}` is substituted on open.
class PipeAudioDevice final : public AudioDevice {
 public:
  explicit PipeAudioDevice(std::string command);
  ~PipeAudioDevice() override;

  std::string_view name() const override { return "pipe"; }
  void open(int sample_rate) override;
  bool write(std::span<const std::int16_t> chunk) override;
  void close() override;

 private:
  std::string command_;
  std::FILE* pipe_ = nullptr;
};

/// "null" -> NullAudioDevice, "pipe:<command>" -> PipeAudioDevice,
/// "none" -> nullptr (no playback available). Other names: DeviceError.
std::shared_ptr<AudioDevice> make_audio_device(std::string_view name);

/// Sole owner of an audio device. Requests are served strictly FIFO by one
/// worker thread; each waits for its start signal before the first sample is
/// submitted, so buffers never interleave on the device.
class Player {
 public:
  explicit Player(std::shared_ptr<AudioDevice> device,
                  std::chrono::milliseconds start_timeout = std::chrono::seconds(60),
                  std::size_t chunk_samples = 1024);
  ~Player();

  Player(const Player&) = delete;
  Player& operator=(const Player&) = delete;

  std::future<PlaybackReport> enqueue(WaveBuffer buffer, StartSignal signal,
                                      std::string id = {});

  std::size_t pending() const;
  AudioDevice& device() noexcept { return *device_; }

 private:
  struct Request {
    std::string id;
    WaveBuffer buffer;
    StartSignal signal;
    SteadyClock::time_point deadline;
    std::promise<PlaybackReport> done;
  };

  void run();
  PlaybackReport perform(Request& req);

  std::shared_ptr<AudioDevice> device_;
  std::chrono::milliseconds start_timeout_;
  std::size_t chunk_samples_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Request> queue_;
  bool stopping_ = false;
  std::thread worker_;
};

/// Queues `buffer` and blocks until it has played (or expired).
PlaybackReport play(Player& player, WaveBuffer buffer, StartSignal signal);

}  // namespace hapticaffect
