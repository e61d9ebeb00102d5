#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hapticaffect/affect.hpp"
#include "hapticaffect/audio.hpp"
#include "hapticaffect/estimator.hpp"
#include "hapticaffect/mapping.hpp"
#include "hapticaffect/synth.hpp"

namespace hapticaffect {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

Timestamp now_utc();
std::string format_timestamp(Timestamp t);  // 2026-01-02T03:04:05.678Z
Timestamp parse_timestamp(std::string_view text);

enum class Condition { WithVibro, WithoutVibro };

const char* to_string(Condition c) noexcept;
Condition parse_condition(std::string_view name);

enum class PhraseSource { Paper, Custom };

struct Phrase {
  int id = 0;
  std::string text;
  PhraseSource source = PhraseSource::Custom;
  std::string original;  // optional Japanese original, informational only

  friend bool operator==(const Phrase&, const Phrase&) = default;
};

using PhraseSet = std::vector<Phrase>;

/// The ten evaluation phrases in English translation.
PhraseSet evaluation_phrases();

/// Reads a JSON array of {id, text, source[, original]} objects.
PhraseSet load_phrases(const std::filesystem::path& path);

/// Throws ConfigError on an empty set, duplicate ids or blank text.
void validate_phrases(const PhraseSet& phrases);

const Phrase& find_phrase(const PhraseSet& phrases, int id);

struct SessionPlan {
  std::string participant_id;
  std::size_t participant_index = 0;
  std::array<Condition, 2> condition_order{Condition::WithVibro, Condition::WithoutVibro};
  /// phrase_orders[k] is the presentation order for condition_order[k].
  std::array<std::vector<int>, 2> phrase_orders;
  std::uint64_t rng_seed = 0;

  const std::vector<int>& order_for(Condition c) const;

  friend bool operator==(const SessionPlan&, const SessionPlan&) = default;
};

std::string default_participant_id(std::size_t participant_index);

/// Even indices hear the vibrotactile condition first, odd indices second.
/// Phrase orders are independent seeded shuffles, reproducible from
/// (participant_index, seed).
SessionPlan plan_session(std::size_t participant_index, const PhraseSet& phrases,
                         std::uint64_t seed, std::string participant_id = {});

/// Rating instrument ranges. SAM rows are 1..sam_points, IOS is 1..ios_points.
struct RatingScales {
  int sam_points = 9;
  int ios_points = 7;
};

struct SamRating {
  int valence = 0;
  int arousal = 0;

  friend bool operator==(const SamRating&, const SamRating&) = default;
};

enum class TrialStatus { Pending, Completed, Skipped };

const char* to_string(TrialStatus s) noexcept;

struct TrialRecord {
  std::string participant_id;
  Condition condition = Condition::WithoutVibro;
  int phrase_id = 0;
  TrialStatus status = TrialStatus::Pending;
  std::optional<SamRating> sam;
  std::optional<AffectScore> affect;
  std::optional<VibrationParams> vibration;  // present iff with-vibro and not skipped
  std::string skip_reason;
  Timestamp timestamp{};

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct IosRecord {
  std::string participant_id;
  Condition condition = Condition::WithoutVibro;
  int ios = 0;
  Timestamp timestamp{};

  friend bool operator==(const IosRecord&, const IosRecord&) = default;
};

/// Stand-in for the robot's speech. speak() is called once per trial, after
/// any stimulus has been queued; implementations fire `onset` when speech
/// begins. The default fires immediately.
class SpeechCue {
 public:
  virtual ~SpeechCue() = default;
  virtual void speak(const Phrase& phrase, StartSignal& onset);
};

/// Everything a trial needs to turn text into a presented stimulus.
struct Pipeline {
  std::shared_ptr<const AffectEstimator> estimator;
  EnvelopeSpec envelope{};
  int sample_rate = kDefaultSampleRate;
  std::shared_ptr<Player> player;          // may be null: stimulus rendered, not played
  std::shared_ptr<SpeechCue> speech;       // null: onset fired immediately
};

/// Presents one phrase. With vibration: estimate, map, synthesize, queue
/// playback on the start signal, cue speech, wait for playback. Without:
/// cue speech only. Errors mark the record skipped instead of propagating.
TrialRecord run_trial(const SessionPlan& plan, const Phrase& phrase, Condition condition,
                      const Pipeline& pipeline);

/// Completes a pending record. ValidationError for out-of-range ratings,
/// StateError if the record is not pending.
TrialRecord record_sam(TrialRecord record, int valence, int arousal,
                       const RatingScales& scales = {});

IosRecord make_ios_record(std::string participant_id, Condition condition, int ios,
                          const RatingScales& scales = {});

}  // namespace hapticaffect
