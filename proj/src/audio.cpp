#include "hapticaffect/audio.hpp"

#include <bit>
#include <csignal>
#include <cstdio>

#include "hapticaffect/error.hpp"

namespace hapticaffect {

struct StartSignal::State {
  mutable std::mutex mu;
  mutable std::condition_variable cv;
  std::optional<SteadyClock::time_point> fired_at;
};

StartSignal::StartSignal() : state_(std::make_shared<State>()) {}

bool StartSignal::fire() {
  {
    std::lock_guard lock(state_->mu);
    if (state_->fired_at) return false;
    state_->fired_at = SteadyClock::now();
  }
  state_->cv.notify_all();
  return true;
}

bool StartSignal::fired() const {
  std::lock_guard lock(state_->mu);
  return state_->fired_at.has_value();
}

std::optional<SteadyClock::time_point> StartSignal::fired_at() const {
  std::lock_guard lock(state_->mu);
  return state_->fired_at;
}

bool StartSignal::wait_until(SteadyClock::time_point deadline) const {
  std::unique_lock lock(state_->mu);
  return state_->cv.wait_until(lock, deadline, [&] { return state_->fired_at.has_value(); });
}

const char* to_string(PlaybackStatus s) noexcept {
  switch (s) {
    case PlaybackStatus::Played: return "played";
    case PlaybackStatus::Expired: return "expired";
    case PlaybackStatus::Cancelled: return "cancelled";
    case PlaybackStatus::DeviceFailure: return "device-failure";
  }
  return "unknown";
}

// --- NullAudioDevice ------------------------------------------------------

void NullAudioDevice::open(int sample_rate) {
  std::lock_guard lock(mu_);
  if (is_open_) throw DeviceError("null device already open");
  is_open_ = true;
  sample_rate_ = sample_rate;
  stream_offset_ = 0;
  ++streams_;
}

bool NullAudioDevice::write(std::span<const std::int16_t> chunk) {
  {
    std::lock_guard lock(mu_);
    if (!is_open_) throw DeviceError("null device written while closed");
    chunks_.push_back({streams_ - 1, stream_offset_, chunk.size()});
    stream_offset_ += chunk.size();
    samples_.insert(samples_.end(), chunk.begin(), chunk.end());
  }
  if (pace_realtime_ && sample_rate_ > 0)
    std::this_thread::sleep_for(std::chrono::duration<double>(static_cast<double>(chunk.size()) / sample_rate_));
  return false;
}

void NullAudioDevice::close() {
  std::lock_guard lock(mu_);
  is_open_ = false;
}

std::vector<NullAudioDevice::Chunk> NullAudioDevice::chunks() const {
  std::lock_guard lock(mu_);
  return chunks_;
}

std::vector<std::int16_t> NullAudioDevice::samples() const {
  std::lock_guard lock(mu_);
  return samples_;
}

std::size_t NullAudioDevice::streams_opened() const {
  std::lock_guard lock(mu_);
  return streams_;
}

// --- PipeAudioDevice ------------------------------------------------------

PipeAudioDevice::PipeAudioDevice(std::string command) : command_(std::move(command)) {
  if (command_.empty()) throw DeviceError("pipe device needs a command");
}

PipeAudioDevice::~PipeAudioDevice() {
  if (pipe_) ::pclose(pipe_);
}

void PipeAudioDevice::open(int sample_rate) {
  if (pipe_) throw DeviceError("pipe device already open");
  std::string cmd = command_;
  if (auto at = cmd.find("{rate}"); at != std::string::npos) cmd.replace(at, 6, std::to_string(sample_rate));
  std::signal(SIGPIPE, SIG_IGN);
  pipe_ = ::popen(cmd.c_str(), "w");
  if (!pipe_) throw DeviceError("cannot start audio command: " + cmd);
}

bool PipeAudioDevice::write(std::span<const std::int16_t> chunk) {
  if (!pipe_) throw DeviceError("pipe device written while closed");
  // S16LE on the wire; x86 and aarch64 are little-endian already.
  static_assert(std::endian::native == std::endian::little);
  if (std::fwrite(chunk.data(), sizeof(std::int16_t), chunk.size(), pipe_) != chunk.size())
    throw DeviceError("audio command stopped accepting data");
  return false;
}

void PipeAudioDevice::close() {
  if (!pipe_) return;
  const int status = ::pclose(pipe_);
  pipe_ = nullptr;
  if (status != 0) throw DeviceError("audio command exited with status " + std::to_string(status));
}

std::shared_ptr<AudioDevice> make_audio_device(std::string_view name) {
  if (name == "null") return std::make_shared<NullAudioDevice>();
  if (name == "none") return nullptr;
  if (name.starts_with("pipe:")) return std::make_shared<PipeAudioDevice>(std::string(name.substr(5)));
  throw DeviceError("unknown audio device '" + std::string(name) + "'");
}

// --- Player ---------------------------------------------------------------

Player::Player(std::shared_ptr<AudioDevice> device, std::chrono::milliseconds start_timeout,
               std::size_t chunk_samples)
    : device_(std::move(device)), start_timeout_(start_timeout), chunk_samples_(chunk_samples) {
  if (!device_) throw DeviceError("player needs an audio device");
  if (chunk_samples_ == 0) chunk_samples_ = 1024;
  worker_ = std::thread([this] { run(); });
}

Player::~Player() {
  std::deque<Request> abandoned;
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
    abandoned.swap(queue_);
  }
  cv_.notify_all();
  for (auto& req : abandoned) {
    PlaybackReport r;
    r.id = req.id;
    r.status = PlaybackStatus::Cancelled;
    r.device = std::string(device_->name());
    req.done.set_value(std::move(r));
  }
  worker_.join();
}

std::future<PlaybackReport> Player::enqueue(WaveBuffer buffer, StartSignal signal, std::string id) {
  Request req{std::move(id), std::move(buffer), std::move(signal), SteadyClock::now() + start_timeout_, {}};
  auto fut = req.done.get_future();
  {
    std::lock_guard lock(mu_);
    if (stopping_) throw DeviceError("player is shutting down");
    queue_.push_back(std::move(req));
  }
  cv_.notify_one();
  return fut;
}

std::size_t Player::pending() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

void Player::run() {
  for (;;) {
    Request req;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      req = std::move(queue_.front());
      queue_.pop_front();
    }
    req.done.set_value(perform(req));
  }
}

PlaybackReport Player::perform(Request& req) {
  PlaybackReport report;
  report.id = req.id;
  report.device = std::string(device_->name());
  report.simulated = device_->simulated();

  // Wait for the speech onset in 50 ms slices.
  for (;;) {
    const auto slice = std::min(req.deadline, SteadyClock::now() + std::chrono::milliseconds(50));
    if (req.signal.wait_until(slice)) break;
    {
      std::lock_guard lock(mu_);
      if (stopping_) {
        report.status = PlaybackStatus::Cancelled;
        return report;
      }
    }
    if (SteadyClock::now() >= req.deadline) {
      report.status = PlaybackStatus::Expired;
      return report;
    }
  }

  try {
    device_->open(req.buffer.sample_rate);
    const auto submitted_at = SteadyClock::now();
    report.start_offset = submitted_at - *req.signal.fired_at();
    std::span<const std::int16_t> rest(req.buffer.samples);
    while (!rest.empty()) {
      const auto chunk = rest.first(std::min(chunk_samples_, rest.size()));
      if (device_->write(chunk)) ++report.underruns;
      report.samples_submitted += chunk.size();
      rest = rest.subspan(chunk.size());
    }
    device_->close();
  } catch (const Error& e) {
    report.status = PlaybackStatus::DeviceFailure;
    report.error = e.what();
    try {
      device_->close();
    } catch (...) {
    }
    return report;
  }
  report.audio_duration_s = static_cast<double>(report.samples_submitted) / req.buffer.sample_rate;
  report.status = PlaybackStatus::Played;
  return report;
}

PlaybackReport play(Player& player, WaveBuffer buffer, StartSignal signal) {
  return player.enqueue(std::move(buffer), std::move(signal)).get();
}

}  // namespace hapticaffect
