#include "hapticaffect/session_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "hapticaffect/error.hpp"

namespace hapticaffect {

using nlohmann::json;

void to_json(json& j, const AffectScore& s) {
  j = {{"pleasure", s.pleasure}, {"misery", s.misery}, {"arousal", s.arousal}, {"sleepiness", s.sleepiness}};
}

void from_json(const json& j, AffectScore& s) {
  j.at("pleasure").get_to(s.pleasure);
  j.at("misery").get_to(s.misery);
  j.at("arousal").get_to(s.arousal);
  j.at("sleepiness").get_to(s.sleepiness);
}

void to_json(json& j, const VibrationParams& p) {
  j = {{"frequency_hz", p.frequency_hz}, {"amplitude", p.amplitude}, {"duration_s", p.duration_s}};
}

void from_json(const json& j, VibrationParams& p) {
  j.at("frequency_hz").get_to(p.frequency_hz);
  j.at("amplitude").get_to(p.amplitude);
  j.at("duration_s").get_to(p.duration_s);
}

void to_json(json& j, const Phrase& p) {
  j = {{"id", p.id}, {"text", p.text}, {"source", p.source == PhraseSource::Paper ? "paper" : "custom"}};
  if (!p.original.empty()) j["original"] = p.original;
}

void from_json(const json& j, Phrase& p) {
  j.at("id").get_to(p.id);
  j.at("text").get_to(p.text);
  const std::string source = j.value("source", std::string("custom"));
  if (source != "paper" && source != "custom") throw InputError("unknown phrase source '" + source + "'");
  p.source = source == "paper" ? PhraseSource::Paper : PhraseSource::Custom;
  p.original = j.value("original", std::string());
}

void to_json(json& j, const SessionPlan& p) {
  j = {{"participant_id", p.participant_id},
       {"participant_index", p.participant_index},
       {"condition_order", {to_string(p.condition_order[0]), to_string(p.condition_order[1])}},
       {"phrase_orders", {p.phrase_orders[0], p.phrase_orders[1]}},
       {"rng_seed", p.rng_seed}};
}

void from_json(const json& j, SessionPlan& p) {
  j.at("participant_id").get_to(p.participant_id);
  j.at("participant_index").get_to(p.participant_index);
  const auto& order = j.at("condition_order");
  p.condition_order = {parse_condition(order.at(0).get<std::string>()),
                       parse_condition(order.at(1).get<std::string>())};
  const auto& orders = j.at("phrase_orders");
  orders.at(0).get_to(p.phrase_orders[0]);
  orders.at(1).get_to(p.phrase_orders[1]);
  j.at("rng_seed").get_to(p.rng_seed);
}

void to_json(json& j, const TrialRecord& r) {
  j = {{"participant_id", r.participant_id},
       {"condition", to_string(r.condition)},
       {"phrase_id", r.phrase_id},
       {"status", to_string(r.status)},
       {"timestamp", format_timestamp(r.timestamp)}};
  j["sam"] = r.sam ? json{{"valence", r.sam->valence}, {"arousal", r.sam->arousal}} : json(nullptr);
  j["affect"] = r.affect ? json(*r.affect) : json(nullptr);
  j["vibration"] = r.vibration ? json(*r.vibration) : json(nullptr);
  if (!r.skip_reason.empty()) j["skip_reason"] = r.skip_reason;
}

void from_json(const json& j, TrialRecord& r) {
  j.at("participant_id").get_to(r.participant_id);
  r.condition = parse_condition(j.at("condition").get<std::string>());
  j.at("phrase_id").get_to(r.phrase_id);
  const auto status = j.at("status").get<std::string>();
  if (status == "pending") r.status = TrialStatus::Pending;
  else if (status == "completed") r.status = TrialStatus::Completed;
  else if (status == "skipped") r.status = TrialStatus::Skipped;
  else throw InputError("unknown trial status '" + status + "'");
  r.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
  r.sam.reset();
  if (const auto& s = j.value("sam", json(nullptr)); !s.is_null())
    r.sam = SamRating{s.at("valence").get<int>(), s.at("arousal").get<int>()};
  r.affect.reset();
  if (const auto& a = j.value("affect", json(nullptr)); !a.is_null()) r.affect = a.get<AffectScore>();
  r.vibration.reset();
  if (const auto& v = j.value("vibration", json(nullptr)); !v.is_null()) r.vibration = v.get<VibrationParams>();
  r.skip_reason = j.value("skip_reason", std::string());
}

void to_json(json& j, const IosRecord& r) {
  j = {{"participant_id", r.participant_id},
       {"condition", to_string(r.condition)},
       {"ios", r.ios},
       {"timestamp", format_timestamp(r.timestamp)}};
}

void from_json(const json& j, IosRecord& r) {
  j.at("participant_id").get_to(r.participant_id);
  r.condition = parse_condition(j.at("condition").get<std::string>());
  j.at("ios").get_to(r.ios);
  r.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
}

SessionLog::SessionLog(std::filesystem::path path) : path_(std::move(path)) {
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError(std::string("cannot open session log (") + std::strerror(errno) + ")", path_.string());
}

SessionLog::~SessionLog() {
  if (fd_ >= 0) ::close(fd_);
}

void SessionLog::append_line(const json& record) {
  json line = record;
  line["schema"] = kSessionLogSchema;
  const std::string text = line.dump() + "\n";

  std::lock_guard lock(mu_);
  std::size_t done = 0;
  while (done < text.size()) {
    const ssize_t n = ::write(fd_, text.data() + done, text.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError(std::string("session log write failed (") + std::strerror(errno) + ")", path_.string());
    }
    done += static_cast<std::size_t>(n);
  }
  ::fdatasync(fd_);
}

void SessionLog::append(const SessionPlan& plan) {
  json j = plan;
  j["type"] = "plan";
  append_line(j);
}

void SessionLog::append(const TrialRecord& record) {
  json j = record;
  j["type"] = "trial";
  append_line(j);
}

void SessionLog::append(const IosRecord& record) {
  json j = record;
  j["type"] = "ios";
  append_line(j);
}

LogContents replay_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open session log", path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  LogContents out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    const bool terminated = nl != std::string::npos;
    const std::string_view line(text.data() + start, (terminated ? nl : text.size()) - start);
    start = terminated ? nl + 1 : text.size();
    ++line_no;
    const bool last = start >= text.size();
    if (line.empty()) continue;

    try {
      if (!terminated) throw std::runtime_error("unterminated line");
      const json j = json::parse(line);
      const int schema = j.at("schema").get<int>();
      if (schema != kSessionLogSchema)
        throw IoError("unsupported schema " + std::to_string(schema) + " at line " + std::to_string(line_no),
                      path.string());
      const std::string type = j.at("type").get<std::string>();
      if (type == "plan") out.plans.push_back(j.get<SessionPlan>());
      else if (type == "trial") out.trials.push_back(j.get<TrialRecord>());
      else if (type == "ios") out.ios.push_back(j.get<IosRecord>());
      else throw IoError("unknown record type '" + type + "' at line " + std::to_string(line_no), path.string());
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      if (!last) throw IoError("corrupt record at line " + std::to_string(line_no) + " (" + e.what() + ")", path.string());
      out.truncated_tail = true;
    }
  }
  return out;
}

}  // namespace hapticaffect
