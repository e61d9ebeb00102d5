#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>

#include "hapticaffect/session.hpp"

namespace hapticaffect {

struct ConditionSummary {
  std::size_t trials = 0;
  double valence_mean = 0.0;
  double valence_median = 0.0;
  double arousal_mean = 0.0;
  double arousal_median = 0.0;
  std::size_t ios_count = 0;
  double ios_mean = 0.0;

  friend bool operator==(const ConditionSummary&, const ConditionSummary&) = default;
};

/// Rating -> number of responses, for one phrase under one condition.
struct RatingCounts {
  std::map<int, std::size_t> valence;
  std::map<int, std::size_t> arousal;

  friend bool operator==(const RatingCounts&, const RatingCounts&) = default;
};

struct SummaryReport {
  std::map<Condition, ConditionSummary> conditions;
  std::map<std::pair<int, Condition>, RatingCounts> per_phrase;

  bool empty() const noexcept { return conditions.empty() && per_phrase.empty(); }

  /// UTF-8 CSV with header `section,condition,phrase_id,metric,value`.
  std::string to_csv() const;

  friend bool operator==(const SummaryReport&, const SummaryReport&) = default;
};

/// Aggregates completed trials (pending and skipped are ignored) and IOS
/// records per condition and per phrase.
SummaryReport summarize(std::span<const TrialRecord> trials, std::span<const IosRecord> ios);

double median(std::vector<double> values);

}  // namespace hapticaffect
