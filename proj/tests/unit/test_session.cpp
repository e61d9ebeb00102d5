#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <unistd.h>

#include "hapticaffect/error.hpp"
#include "hapticaffect/lexicon.hpp"
#include "hapticaffect/session_log.hpp"
#include "hapticaffect/session_runner.hpp"

using namespace hapticaffect;

namespace {

class FixedTransport final : public ChatTransport {
 public:
  explicit FixedTransport(std::string reply) : reply_(std::move(reply)) {}
  std::string complete(const ChatRequest&) override { return reply_; }

 private:
  std::string reply_;
};

std::shared_ptr<const AffectEstimator> stub_estimator(std::string reply) {
  EstimatorConfig cfg;
  cfg.backend = EstimatorBackend::RemoteLlm;
  cfg.max_retries = 0;
  return std::make_shared<AffectEstimator>(cfg, nullptr, std::make_shared<FixedTransport>(std::move(reply)));
}

std::shared_ptr<const AffectEstimator> lexicon_estimator() {
  return std::make_shared<AffectEstimator>(EstimatorConfig{}, std::make_shared<Lexicon>(shipped_lexicon()));
}

struct TempDir {
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("hapticaffect-session-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::filesystem::path path;
  static inline int counter = 0;
};

Pipeline pipeline_with(std::shared_ptr<const AffectEstimator> est, std::shared_ptr<Player> player = nullptr) {
  Pipeline p;
  p.estimator = std::move(est);
  p.player = std::move(player);
  return p;
}

struct MidParticipant final : SimulatedParticipant {
  SamRating rate(const TrialRecord&) override { return {5, 5}; }
  int rate_ios(Condition c) override { return c == Condition::WithVibro ? 6 : 4; }
};

}  // namespace

TEST_CASE("evaluation phrase set") {
  const PhraseSet set = evaluation_phrases();
  REQUIRE(set.size() == 10);
  CHECK(find_phrase(set, 9).text == "Every day is just so much fun!");
  CHECK(load_phrases(std::filesystem::path(HAPTICAFFECT_DATA_DIR) / "phrases.json") == set);
  CHECK_THROWS_AS(find_phrase(set, 11), InputError);
}

TEST_CASE("phrase set validation") {
  TempDir dir;
  const auto write = [&](const std::string& body) {
    const auto p = dir.path / "p.json";
    std::ofstream(p) << body;
    return p;
  };
  CHECK_THROWS_AS(load_phrases(write("[]")), ConfigError);
  CHECK_THROWS_AS(load_phrases(write(R"([{"id":1,"text":"a","source":"custom"},{"id":1,"text":"b","source":"custom"}])")),
                  ConfigError);
  CHECK_THROWS_AS(load_phrases(write(R"([{"id":1,"text":"  ","source":"custom"}])")), ConfigError);
  CHECK_THROWS_AS(load_phrases(write("{")), ConfigError);
  CHECK_THROWS_AS(load_phrases(dir.path / "missing.json"), ConfigError);
  CHECK(load_phrases(write(R"([{"id":3,"text":"hi","source":"custom"}])")).front().text == "hi");
}

TEST_CASE("half the participants start with vibration") {
  const PhraseSet set = evaluation_phrases();
  int vibro_first = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    const SessionPlan plan = plan_session(i, set, 42);
    vibro_first += plan.condition_order[0] == Condition::WithVibro;
    CHECK(plan.condition_order[0] != plan.condition_order[1]);
    CHECK(plan.participant_id == default_participant_id(i));
  }
  CHECK(vibro_first == 3);
  CHECK(default_participant_id(0) == "P01");
}

TEST_CASE("plans are deterministic permutations") {
  const PhraseSet set = evaluation_phrases();
  std::set<std::vector<int>> distinct;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    for (std::size_t i = 0; i < 6; ++i) {
      const SessionPlan a = plan_session(i, set, seed);
      CHECK(a == plan_session(i, set, seed));
      for (const auto& order : a.phrase_orders) {
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
        distinct.insert(order);
      }
    }
  CHECK(distinct.size() > 200);
}

TEST_CASE("plans are pinned for a fixed seed") {
  const SessionPlan p0 = plan_session(0, evaluation_phrases(), 1);
  CHECK(p0.phrase_orders[0] == std::vector<int>{3, 2, 9, 10, 7, 8, 4, 6, 1, 5});
  CHECK(p0.phrase_orders[1] == std::vector<int>{8, 1, 9, 10, 5, 4, 6, 7, 2, 3});
  const SessionPlan p3 = plan_session(3, evaluation_phrases(), 1);
  CHECK(p3.condition_order[0] == Condition::WithoutVibro);
  CHECK(p3.phrase_orders[0] == std::vector<int>{8, 10, 3, 7, 1, 6, 5, 9, 4, 2});
  CHECK(p3.phrase_orders[1] == std::vector<int>{5, 10, 6, 4, 9, 3, 1, 8, 2, 7});
}

TEST_CASE("trial with vibration maps a neutral estimate") {
  const PhraseSet set = evaluation_phrases();
  const SessionPlan plan = plan_session(0, set, 1);
  auto dev = std::make_shared<NullAudioDevice>();
  auto player = std::make_shared<Player>(dev);
  const Pipeline p = pipeline_with(stub_estimator("Pleasure: 50%, Misery: 50%, Arousal: 50%, Sleepiness: 50%"), player);
  const TrialRecord rec = run_trial(plan, find_phrase(set, 1), Condition::WithVibro, p);
  CHECK(rec.status == TrialStatus::Pending);
  REQUIRE(rec.vibration);
  CHECK(*rec.vibration == VibrationParams{280.0, 20384, 0.5});
  CHECK(dev->samples().size() == 22050);
}

TEST_CASE("trial without vibration carries no stimulus") {
  const PhraseSet set = evaluation_phrases();
  const SessionPlan plan = plan_session(1, set, 1);
  auto dev = std::make_shared<NullAudioDevice>();
  const TrialRecord rec =
      run_trial(plan, find_phrase(set, 2), Condition::WithoutVibro, pipeline_with(lexicon_estimator(),
                                                                                   std::make_shared<Player>(dev)));
  CHECK_FALSE(rec.vibration);
  CHECK_FALSE(rec.affect);
  CHECK(rec.status == TrialStatus::Pending);
  CHECK(dev->samples().empty());
}

TEST_CASE("estimator failure skips the trial") {
  const PhraseSet set = evaluation_phrases();
  const SessionPlan plan = plan_session(0, set, 1);
  const TrialRecord rec = run_trial(plan, find_phrase(set, 3), Condition::WithVibro, pipeline_with(stub_estimator("??")));
  CHECK(rec.status == TrialStatus::Skipped);
  CHECK_FALSE(rec.vibration);
  CHECK(rec.skip_reason.find("estimation") == 0);
}

TEST_CASE("SAM recording") {
  TrialRecord pending;
  pending.participant_id = "P01";
  CHECK_THROWS_AS(record_sam(pending, 0, 5), ValidationError);
  CHECK_THROWS_AS(record_sam(pending, 5, 10), ValidationError);
  const TrialRecord done = record_sam(pending, 9, 1);
  CHECK(done.status == TrialStatus::Completed);
  CHECK(done.sam == SamRating{9, 1});
  CHECK_THROWS_AS(record_sam(done, 5, 5), StateError);
  CHECK(record_sam(pending, 7, 7, RatingScales{7, 7}).sam == SamRating{7, 7});
  CHECK_THROWS_AS(make_ios_record("P01", Condition::WithVibro, 8), ValidationError);
}

TEST_CASE("summary of a single condition") {
  std::vector<TrialRecord> trials;
  for (int i = 1; i <= 4; ++i) {
    TrialRecord t;
    t.condition = Condition::WithVibro;
    t.phrase_id = i;
    t.status = TrialStatus::Completed;
    t.sam = SamRating{i + 3, 5};
    trials.push_back(t);
  }
  TrialRecord skipped;
  skipped.status = TrialStatus::Skipped;
  trials.push_back(skipped);
  const SummaryReport r = summarize(trials, {});
  const ConditionSummary& c = r.conditions.at(Condition::WithVibro);
  CHECK(c.trials == 4);
  CHECK(c.valence_mean == 5.5);
  CHECK(c.valence_median == 5.5);
  CHECK(c.arousal_mean == 5.0);
  CHECK(r.per_phrase.at({2, Condition::WithVibro}).valence.at(5) == 1);
  CHECK_FALSE(r.conditions.contains(Condition::WithoutVibro));
  CHECK(r.to_csv().rfind("section,condition,phrase_id,metric,value\n", 0) == 0);
  CHECK(r.to_csv().find("condition,with-vibro,,valence_mean,5.500000\n") != std::string::npos);
}

TEST_CASE("summary agrees with a brute-force fold") {
  std::mt19937_64 rng(41);
  for (int round = 0; round < 50; ++round) {
    std::vector<TrialRecord> trials;
    std::vector<IosRecord> ios;
    const auto n = rng() % 60;
    for (std::size_t i = 0; i < n; ++i) {
      TrialRecord t;
      t.condition = rng() % 2 ? Condition::WithVibro : Condition::WithoutVibro;
      t.phrase_id = 1 + static_cast<int>(rng() % 10);
      t.status = rng() % 5 == 0 ? TrialStatus::Skipped : TrialStatus::Completed;
      if (t.status == TrialStatus::Completed) t.sam = SamRating{1 + static_cast<int>(rng() % 9), 1 + static_cast<int>(rng() % 9)};
      trials.push_back(t);
    }
    for (int k = 0; k < static_cast<int>(rng() % 5); ++k)
      ios.push_back({"P", rng() % 2 ? Condition::WithVibro : Condition::WithoutVibro, 1 + static_cast<int>(rng() % 7), {}});

    const SummaryReport r = summarize(trials, ios);
    for (Condition c : {Condition::WithVibro, Condition::WithoutVibro}) {
      std::vector<int> v, a, o;
      for (const auto& t : trials)
        if (t.condition == c && t.status == TrialStatus::Completed) {
          v.push_back(t.sam->valence);
          a.push_back(t.sam->arousal);
        }
      for (const auto& x : ios)
        if (x.condition == c) o.push_back(x.ios);
      if (v.empty() && o.empty()) {
        CHECK_FALSE(r.conditions.contains(c));
        continue;
      }
      const auto& s = r.conditions.at(c);
      CHECK(s.trials == v.size());
      CHECK(s.ios_count == o.size());
      auto avg = [](const std::vector<int>& xs) {
        long sum = 0;
        for (int x : xs) sum += x;
        return xs.empty() ? 0.0 : static_cast<double>(sum) / xs.size();
      };
      // Median by counting: smallest m with at least half the values <= m.
      auto med = [](std::vector<int> xs) {
        if (xs.empty()) return 0.0;
        std::vector<int> sorted;
        for (int m = 0; m <= 10; ++m)
          for (int x : xs)
            if (x == m) sorted.push_back(x);
        const auto k = sorted.size();
        return k % 2 ? sorted[k / 2] : (sorted[k / 2 - 1] + sorted[k / 2]) / 2.0;
      };
      CHECK(s.valence_mean == doctest::Approx(avg(v)));
      CHECK(s.arousal_mean == doctest::Approx(avg(a)));
      CHECK(s.ios_mean == doctest::Approx(avg(o)));
      CHECK(s.valence_median == med(v));
      CHECK(s.arousal_median == med(a));
    }
  }
}

TEST_CASE("session state machine") {
  const PhraseSet set = evaluation_phrases();
  TempDir dir;
  auto log = std::make_shared<SessionLog>(dir.path / "s.jsonl");
  Session s(plan_session(0, set, 3), set, pipeline_with(lexicon_estimator()), log);
  CHECK(s.phase() == SessionPhase::Idle);
  CHECK_THROWS_AS(s.submit_sam(5, 5), StateError);
  CHECK_THROWS_AS(s.submit_ios(4), StateError);

  const TrialRecord first = s.advance();
  CHECK(first.condition == Condition::WithVibro);
  CHECK(first.phrase_id == s.plan().phrase_orders[0][0]);
  CHECK(s.phase() == SessionPhase::AwaitingSam);
  CHECK_THROWS_AS(s.advance(), StateError);
  CHECK_THROWS_AS(s.submit_sam(10, 5), ValidationError);
  CHECK(s.phase() == SessionPhase::AwaitingSam);

  const TrialRecord rated = s.submit_sam(6, 4, "n1");
  CHECK(s.submit_sam(6, 4, "n1") == rated);
  CHECK(s.trials().size() == 1);
  CHECK(s.state().trials_finished == 1);

  for (int i = 1; i < 10; ++i) {
    s.advance();
    s.submit_sam(5, 5);
  }
  CHECK(s.phase() == SessionPhase::AwaitingIos);
  const IosRecord ios = s.submit_ios(5, "i1");
  CHECK(ios.condition == Condition::WithVibro);
  CHECK(s.submit_ios(5, "i1") == ios);
  CHECK(s.ios_records().size() == 1);
  CHECK(s.phase() == SessionPhase::Idle);
  CHECK(s.advance().condition == Condition::WithoutVibro);
}

TEST_CASE("simulated protocol for six participants") {
  const PhraseSet set = evaluation_phrases();
  TempDir dir;
  int vibro_first = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    const auto path = dir.path / ("p" + std::to_string(i) + ".jsonl");
    auto dev = std::make_shared<NullAudioDevice>();
    Session s(plan_session(i, set, 99), set, pipeline_with(lexicon_estimator(), std::make_shared<Player>(dev)),
              std::make_shared<SessionLog>(path));
    auto participant = make_seeded_participant(1000 + i);
    run_to_completion(s, *participant);
    CHECK(s.phase() == SessionPhase::Done);

    const auto trials = s.trials();
    REQUIRE(trials.size() == 20);
    CHECK(s.ios_records().size() == 2);
    vibro_first += trials.front().condition == Condition::WithVibro;
    for (const auto& t : trials) {
      CHECK(t.status == TrialStatus::Completed);
      if (t.condition == Condition::WithoutVibro) {
        CHECK_FALSE(t.vibration);
      } else {
        CHECK(t.vibration);
      }
    }
    CHECK(dev->streams_opened() == 10);

    const LogContents replay = replay_log(path);
    CHECK_FALSE(replay.truncated_tail);
    REQUIRE(replay.plans.size() == 1);
    CHECK(replay.plans[0] == s.plan());
    CHECK(replay.trials == trials);
    CHECK(replay.ios == s.ios_records());
    CHECK(summarize(replay.trials, replay.ios) == s.summary());
    CHECK(summarize(replay.trials, replay.ios).to_csv() == s.summary().to_csv());
  }
  CHECK(vibro_first == 3);
}

TEST_CASE("log replay tolerates only a damaged final line") {
  TempDir dir;
  const auto path = dir.path / "log.jsonl";
  const PhraseSet set = evaluation_phrases();
  {
    Session s(plan_session(2, set, 5), set, pipeline_with(lexicon_estimator()), std::make_shared<SessionLog>(path));
    MidParticipant mp;
    run_to_completion(s, mp);
    CHECK(s.summary().conditions.at(Condition::WithVibro).ios_mean == 6.0);
  }
  const auto full = replay_log(path);
  CHECK(full.trials.size() == 20);

  std::ofstream(path, std::ios::app) << R"({"schema":1,"type":"trial","partic)";
  const auto cut = replay_log(path);
  CHECK(cut.truncated_tail);
  CHECK(cut.trials == full.trials);

  std::string body;
  {
    std::ifstream in(path);
    body.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto second = body.find('\n') + 1;
  body.insert(second, "garbage\n");
  std::ofstream(path, std::ios::trunc) << body;
  CHECK_THROWS_AS(replay_log(path), IoError);
  CHECK_THROWS_AS(replay_log(dir.path / "absent.jsonl"), IoError);
}

TEST_CASE("log lines are self-describing") {
  TempDir dir;
  const auto path = dir.path / "one.jsonl";
  {
    SessionLog log(path);
    log.append(plan_session(0, evaluation_phrases(), 0));
    log.append(IosRecord{"P01", Condition::WithVibro, 3, now_utc()});
  }
  std::ifstream in(path);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("schema") == 1);
    CHECK(j.contains("type"));
    ++n;
  }
  CHECK(n == 2);
}

TEST_CASE("timestamps round trip") {
  const Timestamp t = now_utc();
  CHECK(parse_timestamp(format_timestamp(t)) == t);
  CHECK(format_timestamp(parse_timestamp("2026-01-02T03:04:05.678Z")) == "2026-01-02T03:04:05.678Z");
  CHECK_THROWS_AS(parse_timestamp("yesterday"), InputError);
}
