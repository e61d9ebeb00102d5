#include "hapticaffect/session_runner.hpp"

#include <algorithm>
#include <random>

#include "hapticaffect/error.hpp"

namespace hapticaffect {

const char* to_string(SessionPhase p) noexcept {
  switch (p) {
    case SessionPhase::Idle: return "idle";
    case SessionPhase::Playing: return "playing";
    case SessionPhase::AwaitingSam: return "awaiting-sam";
    case SessionPhase::AwaitingIos: return "awaiting-ios";
    case SessionPhase::Done: return "done";
  }
  return "idle";
}

Session::Session(SessionPlan plan, PhraseSet phrases, Pipeline pipeline, std::shared_ptr<SessionLog> log,
                 RatingScales scales)
    : plan_(std::move(plan)),
      phrases_(std::move(phrases)),
      pipeline_(std::move(pipeline)),
      log_(std::move(log)),
      scales_(scales) {
  validate_phrases(phrases_);
  for (const auto& order : plan_.phrase_orders) {
    if (order.size() != phrases_.size()) throw ConfigError("plan does not cover the phrase set");
    for (int id : order) find_phrase(phrases_, id);
  }
  state_.trials_total = 2 * phrases_.size();
  if (log_) log_->append(plan_);
}

SessionState Session::state() const {
  std::lock_guard lock(mu_);
  return state_;
}

SessionPhase Session::phase() const {
  std::lock_guard lock(mu_);
  return state_.phase;
}

Condition Session::current_condition_locked() const {
  return plan_.condition_order[std::min<std::size_t>(state_.condition_index, 1)];
}

TrialRecord Session::advance() {
  Condition condition;
  int phrase_id;
  {
    std::lock_guard lock(mu_);
    if (state_.phase != SessionPhase::Idle)
      throw StateError(std::string("cannot advance while ") + to_string(state_.phase));
    condition = current_condition_locked();
    phrase_id = plan_.phrase_orders[state_.condition_index][state_.phrase_position];
    state_.phase = SessionPhase::Playing;
  }

  // Unlocked while the trial plays.
  TrialRecord rec = run_trial(plan_, find_phrase(phrases_, phrase_id), condition, pipeline_);

  std::lock_guard lock(mu_);
  if (rec.status == TrialStatus::Skipped) {
    finish_trial_locked(rec);
  } else {
    state_.phase = SessionPhase::AwaitingSam;
    state_.current = rec;
  }
  return rec;
}

void Session::finish_trial_locked(TrialRecord record) {
  if (log_) log_->append(record);
  trials_.push_back(std::move(record));
  state_.current.reset();
  ++state_.trials_finished;
  ++state_.phrase_position;
  state_.phase = state_.phrase_position >= phrases_.size() ? SessionPhase::AwaitingIos : SessionPhase::Idle;
}

TrialRecord Session::submit_sam(int valence, int arousal, std::string_view nonce) {
  std::lock_guard lock(mu_);
  if (!nonce.empty() && nonce == last_sam_nonce_ && !trials_.empty()) return trials_.back();
  if (state_.phase != SessionPhase::AwaitingSam || !state_.current)
    throw StateError(std::string("no trial awaiting SAM (phase ") + to_string(state_.phase) + ")");
  TrialRecord done = record_sam(*state_.current, valence, arousal, scales_);
  finish_trial_locked(done);
  last_sam_nonce_ = std::string(nonce);
  return done;
}

IosRecord Session::submit_ios(int ios, std::string_view nonce) {
  std::lock_guard lock(mu_);
  if (!nonce.empty() && nonce == last_ios_nonce_ && !ios_.empty()) return ios_.back();
  if (state_.phase != SessionPhase::AwaitingIos)
    throw StateError(std::string("IOS not expected (phase ") + to_string(state_.phase) + ")");
  IosRecord rec = make_ios_record(plan_.participant_id, current_condition_locked(), ios, scales_);
  if (log_) log_->append(rec);
  ios_.push_back(rec);
  last_ios_nonce_ = std::string(nonce);
  ++state_.condition_index;
  state_.phrase_position = 0;
  state_.phase = state_.condition_index >= 2 ? SessionPhase::Done : SessionPhase::Idle;
  return rec;
}

std::vector<TrialRecord> Session::trials() const {
  std::lock_guard lock(mu_);
  return trials_;
}

std::vector<IosRecord> Session::ios_records() const {
  std::lock_guard lock(mu_);
  return ios_;
}

SummaryReport Session::summary() const {
  std::lock_guard lock(mu_);
  return summarize(trials_, ios_);
}

void run_to_completion(Session& session, SimulatedParticipant& participant) {
  for (;;) {
    const SessionState st = session.state();
    switch (st.phase) {
      case SessionPhase::Idle:
        session.advance();
        break;
      case SessionPhase::AwaitingSam: {
        const SamRating r = participant.rate(*st.current);
        session.submit_sam(r.valence, r.arousal);
        break;
      }
      case SessionPhase::AwaitingIos:
        session.submit_ios(participant.rate_ios(session.plan().condition_order[st.condition_index]));
        break;
      case SessionPhase::Done:
        return;
      case SessionPhase::Playing:
        throw StateError("session is busy playing");
    }
  }
}

namespace {

// Leans its SAM answers towards the presented stimulus (if any) with seeded
// noise. Only meant to exercise the pipeline, not to model people.
class SeededParticipant final : public SimulatedParticipant {
 public:
  SeededParticipant(std::uint64_t seed, RatingScales scales) : rng_(seed), scales_(scales) {}

  SamRating rate(const TrialRecord& trial) override {
    const double mid = (scales_.sam_points + 1) / 2.0;
    double v = mid;
    double a = mid;
    if (trial.affect) {
      v = 1.0 + trial.affect->pleasure / 100.0 * (scales_.sam_points - 1);
      a = 1.0 + trial.affect->arousal / 100.0 * (scales_.sam_points - 1);
    }
    return {clamp_rating(v + noise(), scales_.sam_points), clamp_rating(a + noise(), scales_.sam_points)};
  }

  int rate_ios(Condition) override {
    return static_cast<int>(1 + rng_() % static_cast<std::uint64_t>(scales_.ios_points));
  }

 private:
  double noise() { return static_cast<double>(rng_() % 5) - 2.0; }

  static int clamp_rating(double x, int points) {
    const int r = static_cast<int>(x + 0.5);
    return std::clamp(r, 1, points);
  }

  std::mt19937_64 rng_;
  RatingScales scales_;
};

}  // namespace

std::unique_ptr<SimulatedParticipant> make_seeded_participant(std::uint64_t seed, const RatingScales& scales) {
  return std::make_unique<SeededParticipant>(seed, scales);
}

}  // namespace hapticaffect
