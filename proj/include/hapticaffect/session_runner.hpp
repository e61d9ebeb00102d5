#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "hapticaffect/session.hpp"
#include "hapticaffect/session_log.hpp"
#include "hapticaffect/summary.hpp"

namespace hapticaffect {

enum class SessionPhase { Idle, Playing, AwaitingSam, AwaitingIos, Done };

const char* to_string(SessionPhase p) noexcept;

struct SessionState {
  SessionPhase phase = SessionPhase::Idle;
  std::size_t condition_index = 0;  // position in plan.condition_order
  std::size_t phrase_position = 0;  // position within the current phrase order
  std::size_t trials_finished = 0;  // completed + skipped
  std::size_t trials_total = 0;
  std::optional<TrialRecord> current;
};

/// Single-writer state machine for one participant:
///
///   Idle --advance--> Playing --> AwaitingSam --sam--> Idle | AwaitingIos
///   AwaitingIos --ios--> Idle (next condition) | Done
///
/// A skipped trial goes straight to the next Idle / AwaitingIos. Every
/// finished record is appended to the log when one is attached.
class Session {
 public:
  Session(SessionPlan plan, PhraseSet phrases, Pipeline pipeline,
          std::shared_ptr<SessionLog> log = nullptr, RatingScales scales = {});

  const SessionPlan& plan() const noexcept { return plan_; }
  const PhraseSet& phrases() const noexcept { return phrases_; }
  const RatingScales& scales() const noexcept { return scales_; }

  SessionState state() const;
  SessionPhase phase() const;

  /// Presents the next planned phrase. StateError unless Idle.
  TrialRecord advance();

  /// Re-submitting with the nonce of the last accepted rating returns that
  /// record again instead of failing.
  TrialRecord submit_sam(int valence, int arousal, std::string_view nonce = {});
  IosRecord submit_ios(int ios, std::string_view nonce = {});

  std::vector<TrialRecord> trials() const;
  std::vector<IosRecord> ios_records() const;
  SummaryReport summary() const;

 private:
  void finish_trial_locked(TrialRecord record);
  Condition current_condition_locked() const;

  SessionPlan plan_;
  PhraseSet phrases_;
  Pipeline pipeline_;
  std::shared_ptr<SessionLog> log_;
  RatingScales scales_;

  mutable std::mutex mu_;
  SessionState state_;
  std::vector<TrialRecord> trials_;
  std::vector<IosRecord> ios_;
  std::string last_sam_nonce_;
  std::string last_ios_nonce_;
};

/// Scripted participant used by simulations: returns (valence, arousal)
/// for a presented trial, and the IOS rating for a finished condition.
struct SimulatedParticipant {
  virtual ~SimulatedParticipant() = default;
  virtual SamRating rate(const TrialRecord& trial) = 0;
  virtual int rate_ios(Condition condition) = 0;
};

/// Drives `session` to Done, answering every prompt with `participant`.
void run_to_completion(Session& session, SimulatedParticipant& participant);

/// Deterministic participant whose answers derive from a seed and the
/// presented stimulus.
std::unique_ptr<SimulatedParticipant> make_seeded_participant(std::uint64_t seed,
                                                              const RatingScales& scales = {});

}  // namespace hapticaffect
