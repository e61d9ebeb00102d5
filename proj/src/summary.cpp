#include "hapticaffect/summary.hpp"

#include <algorithm>
#include <cstdio>

namespace hapticaffect {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
}

SummaryReport summarize(std::span<const TrialRecord> trials, std::span<const IosRecord> ios) {
  SummaryReport report;
  std::map<Condition, std::pair<std::vector<double>, std::vector<double>>> ratings;

  for (const auto& t : trials) {
    if (t.status != TrialStatus::Completed || !t.sam) continue;
    auto& [val, aro] = ratings[t.condition];
    val.push_back(t.sam->valence);
    aro.push_back(t.sam->arousal);
    auto& counts = report.per_phrase[{t.phrase_id, t.condition}];
    ++counts.valence[t.sam->valence];
    ++counts.arousal[t.sam->arousal];
  }

  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };

  for (const auto& [cond, pair] : ratings) {
    auto& c = report.conditions[cond];
    c.trials = pair.first.size();
    c.valence_mean = mean(pair.first);
    c.valence_median = median(pair.first);
    c.arousal_mean = mean(pair.second);
    c.arousal_median = median(pair.second);
  }

  std::map<Condition, std::vector<double>> ios_by_cond;
  for (const auto& r : ios) ios_by_cond[r.condition].push_back(r.ios);
  for (const auto& [cond, values] : ios_by_cond) {
    auto& c = report.conditions[cond];
    c.ios_count = values.size();
    c.ios_mean = mean(values);
  }
  return report;
}

std::string SummaryReport::to_csv() const {
  std::string out = "section,condition,phrase_id,metric,value\n";
  char line[160];
  auto row = [&](const char* section, Condition c, const std::string& phrase, const std::string& metric,
                 const std::string& value) {
    std::snprintf(line, sizeof line, "%s,%s,%s,%s,%s\n", section, to_string(c), phrase.c_str(), metric.c_str(),
                  value.c_str());
    out += line;
  };
  auto num = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.6f", v);
    return std::string(b);
  };

  for (const auto& [cond, c] : conditions) {
    row("condition", cond, "", "trials", std::to_string(c.trials));
    row("condition", cond, "", "valence_mean", num(c.valence_mean));
    row("condition", cond, "", "valence_median", num(c.valence_median));
    row("condition", cond, "", "arousal_mean", num(c.arousal_mean));
    row("condition", cond, "", "arousal_median", num(c.arousal_median));
    row("condition", cond, "", "ios_count", std::to_string(c.ios_count));
    row("condition", cond, "", "ios_mean", num(c.ios_mean));
  }
  for (const auto& [key, counts] : per_phrase) {
    const std::string phrase = std::to_string(key.first);
    for (const auto& [rating, n] : counts.valence)
      row("phrase", key.second, phrase, "valence=" + std::to_string(rating), std::to_string(n));
    for (const auto& [rating, n] : counts.arousal)
      row("phrase", key.second, phrase, "arousal=" + std::to_string(rating), std::to_string(n));
  }
  return out;
}

}  // namespace hapticaffect
