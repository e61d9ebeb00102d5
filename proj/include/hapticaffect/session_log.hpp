#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "hapticaffect/session.hpp"

namespace hapticaffect {

inline constexpr int kSessionLogSchema = 1;

void to_json(nlohmann::json& j, const AffectScore& s);
void from_json(const nlohmann::json& j, AffectScore& s);
void to_json(nlohmann::json& j, const VibrationParams& p);
void from_json(const nlohmann::json& j, VibrationParams& p);
void to_json(nlohmann::json& j, const Phrase& p);
void from_json(const nlohmann::json& j, Phrase& p);
void to_json(nlohmann::json& j, const SessionPlan& p);
void from_json(const nlohmann::json& j, SessionPlan& p);
void to_json(nlohmann::json& j, const TrialRecord& r);
void from_json(const nlohmann::json& j, TrialRecord& r);
void to_json(nlohmann::json& j, const IosRecord& r);
void from_json(const nlohmann::json& j, IosRecord& r);

/// Append-only JSON-lines log. Each record is one `write(2)` of a complete
/// line on an O_APPEND descriptor; appends from several threads are
/// serialized.
class SessionLog {
 public:
  explicit SessionLog(std::filesystem::path path);
  ~SessionLog();

  SessionLog(const SessionLog&) = delete;
  SessionLog& operator=(const SessionLog&) = delete;

  void append(const SessionPlan& plan);
  void append(const TrialRecord& record);
  void append(const IosRecord& record);

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  void append_line(const nlohmann::json& record);

  std::filesystem::path path_;
  std::mutex mu_;
  int fd_ = -1;
};

struct LogContents {
  std::vector<SessionPlan> plans;
  std::vector<TrialRecord> trials;
  std::vector<IosRecord> ios;
  /// Unterminated or unparsable trailing line left by an interrupted write.
  bool truncated_tail = false;
};

/// Reads a log back. A damaged final line is tolerated and flagged; damage
/// anywhere else is an IoError.
LogContents replay_log(const std::filesystem::path& path);

}  // namespace hapticaffect
