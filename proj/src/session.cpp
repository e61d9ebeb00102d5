#include "hapticaffect/session.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "hapticaffect/error.hpp"
#include "hapticaffect/session_log.hpp"

namespace hapticaffect {

Timestamp now_utc() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::string format_timestamp(Timestamp t) {
  const auto secs = std::chrono::floor<std::chrono::seconds>(t);
  const auto ms = (t - secs).count();
  const std::time_t tt = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0, ms = 0;
  if (std::sscanf(std::string(text).c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ", &y, &mo, &d, &h, &mi, &s, &ms) != 7)
    throw InputError("bad timestamp '" + std::string(text) + "'");
  using namespace std::chrono;
  const sys_days day = year{y} / month{static_cast<unsigned>(mo)} / static_cast<unsigned>(d);
  return time_point_cast<milliseconds>(day) + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
}

const char* to_string(Condition c) noexcept {
  return c == Condition::WithVibro ? "with-vibro" : "without-vibro";
}

Condition parse_condition(std::string_view name) {
  if (name == "with-vibro") return Condition::WithVibro;
  if (name == "without-vibro") return Condition::WithoutVibro;
  throw InputError("unknown condition '" + std::string(name) + "'");
}

const char* to_string(TrialStatus s) noexcept {
  switch (s) {
    case TrialStatus::Pending: return "pending";
    case TrialStatus::Completed: return "completed";
    case TrialStatus::Skipped: return "skipped";
  }
  return "pending";
}

PhraseSet evaluation_phrases() {
  static const char* const kTexts[] = {
      "I'm happy you're listening to me.",
      "Ouch, ouch! Don't hit me.",
      "I had a bit of a scary dream.",
      "I'm hungry, but I can't eat because I'm a robot.",
      "It was a calm day today.",
      "I have nothing to do, and I'm feeling sleepy.",
      "I feel a bit foggy, like my mind isn't clear.",
      "Nothing special happened today.",
      "Every day is just so much fun!",
      "I feel like I'm under a lot of stress.",
  };
  PhraseSet set;
  int id = 1;
  for (const char* text : kTexts) set.push_back({id++, text, PhraseSource::Paper, {}});
  return set;
}

void validate_phrases(const PhraseSet& phrases) {
  if (phrases.empty()) throw ConfigError("phrase set is empty");
  std::set<int> ids;
  for (const auto& p : phrases) {
    if (!ids.insert(p.id).second) throw ConfigError("duplicate phrase id " + std::to_string(p.id));
    if (p.text.find_first_not_of(" \t\r\n") == std::string::npos)
      throw ConfigError("phrase " + std::to_string(p.id) + " has no text");
  }
}

PhraseSet load_phrases(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read phrase set: " + path.string());
  PhraseSet set;
  try {
    set = nlohmann::json::parse(in).get<PhraseSet>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed phrase set " + path.string() + ": " + e.what());
  } catch (const InputError& e) {
    throw ConfigError("malformed phrase set " + path.string() + ": " + e.what());
  }
  validate_phrases(set);
  return set;
}

const Phrase& find_phrase(const PhraseSet& phrases, int id) {
  for (const auto& p : phrases)
    if (p.id == id) return p;
  throw InputError("phrase id " + std::to_string(id) + " is not in the phrase set");
}

const std::vector<int>& SessionPlan::order_for(Condition c) const {
  return condition_order[0] == c ? phrase_orders[0] : phrase_orders[1];
}

std::string default_participant_id(std::size_t participant_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "P%02zu", participant_index + 1);
  return buf;
}

namespace {

// Uniform integer in [0, bound) by rejection on the raw 64-bit engine output.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

std::vector<int> shuffled_ids(const PhraseSet& phrases, std::mt19937_64& rng) {
  std::vector<int> ids;
  for (const auto& p : phrases) ids.push_back(p.id);
  for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[bounded(rng, i)]);
  return ids;
}

}  // namespace

SessionPlan plan_session(std::size_t participant_index, const PhraseSet& phrases, std::uint64_t seed,
                         std::string participant_id) {
  validate_phrases(phrases);

  SessionPlan plan;
  plan.participant_index = participant_index;
  plan.participant_id = participant_id.empty() ? default_participant_id(participant_index) : std::move(participant_id);
  plan.rng_seed = seed;
  plan.condition_order = participant_index % 2 == 0
                             ? std::array{Condition::WithVibro, Condition::WithoutVibro}
                             : std::array{Condition::WithoutVibro, Condition::WithVibro};

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(participant_index),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(participant_index) >> 32)};
  std::mt19937_64 rng(seq);
  plan.phrase_orders[0] = shuffled_ids(phrases, rng);
  plan.phrase_orders[1] = shuffled_ids(phrases, rng);
  return plan;
}

void SpeechCue::speak(const Phrase&, StartSignal& onset) { onset.fire(); }

TrialRecord run_trial(const SessionPlan& plan, const Phrase& phrase, Condition condition,
                      const Pipeline& pipeline) {
  TrialRecord rec;
  rec.participant_id = plan.participant_id;
  rec.condition = condition;
  rec.phrase_id = phrase.id;
  rec.timestamp = now_utc();

  const auto& order = plan.order_for(condition);
  if (std::find(order.begin(), order.end(), phrase.id) == order.end())
    throw InputError("phrase " + std::to_string(phrase.id) + " is not part of this plan");

  SpeechCue default_cue;
  SpeechCue& cue = pipeline.speech ? *pipeline.speech : default_cue;
  StartSignal onset;

  try {
    if (condition == Condition::WithVibro) {
      if (!pipeline.estimator) throw ConfigError("pipeline has no estimator");
      const AffectScore affect = pipeline.estimator->estimate(phrase.text);
      const VibrationParams params = map_affect(affect, phrase.text);
      WaveBuffer buf = render_stimulus(params, pipeline.envelope, pipeline.sample_rate);

      std::future<PlaybackReport> played;
      if (pipeline.player) played = pipeline.player->enqueue(std::move(buf), onset, {});
      cue.speak(phrase, onset);
      if (played.valid()) {
        const PlaybackReport report = played.get();
        if (report.status != PlaybackStatus::Played)
          throw DeviceError(std::string("playback ") + to_string(report.status) +
                            (report.error.empty() ? "" : ": " + report.error));
      }
      rec.affect = affect;
      rec.vibration = params;
    } else {
      cue.speak(phrase, onset);
    }
  } catch (const Error& e) {
    rec.status = TrialStatus::Skipped;
    rec.skip_reason = std::string(to_string(e.kind())) + ": " + e.what();
    rec.affect.reset();
    rec.vibration.reset();
  }
  return rec;
}

namespace {

void check_rating(int value, int points, const char* what) {
  if (value < 1 || value > points)
    throw ValidationError(std::string(what) + " rating " + std::to_string(value) + " outside 1.." +
                          std::to_string(points));
}

}  // namespace

TrialRecord record_sam(TrialRecord record, int valence, int arousal, const RatingScales& scales) {
  if (record.status != TrialStatus::Pending)
    throw StateError(std::string("trial is ") + to_string(record.status) + ", not pending");
  check_rating(valence, scales.sam_points, "SAM valence");
  check_rating(arousal, scales.sam_points, "SAM arousal");
  record.sam = SamRating{valence, arousal};
  record.status = TrialStatus::Completed;
  record.timestamp = now_utc();
  return record;
}

IosRecord make_ios_record(std::string participant_id, Condition condition, int ios, const RatingScales& scales) {
  check_rating(ios, scales.ios_points, "IOS");
  return IosRecord{std::move(participant_id), condition, ios, now_utc()};
}

}  // namespace hapticaffect
