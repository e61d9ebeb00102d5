#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hapticaffect/affect.hpp"

namespace hapticaffect {

struct LexiconEntry {
  double valence = 0.0;
  double arousal = 0.0;
};

/// Word-weight table for the offline estimator.
///
/// File format (UTF-8): `#`-prefixed header lines carrying `version:` and
/// `scale:` keys, then one `token<TAB>valence<TAB>arousal` row per line.
/// ASCII tokens match whole words case-insensitively; tokens containing
/// non-ASCII characters (Japanese entries) match as substrings.
class Lexicon {
 public:
  Lexicon(std::string version, double scale);

  static Lexicon load(const std::filesystem::path& path);
  static Lexicon parse(std::string_view text);

  void add(std::string token, LexiconEntry entry);

  const std::string& version() const noexcept { return version_; }
  double scale() const noexcept { return scale_; }
  std::size_t size() const noexcept { return words_.size() + phrases_.size(); }

  /// Sum of weights over every match in `utterance`. Unknown tokens add 0.
  LexiconEntry score(std::string_view utterance) const;

 private:
  std::string version_;
  double scale_;
  std::unordered_map<std::string, LexiconEntry> words_;
  std::vector<std::pair<std::string, LexiconEntry>> phrases_;
};

/// Lower-cased ASCII word tokens (letters, digits, inner apostrophes).
std::vector<std::string> tokenize_words(std::string_view utterance);

/// Logistic squash into [0, 100] with midpoint 0.
double squash_percent(double weight_sum, double scale) noexcept;

/// Deterministic offline estimate. Throws InputError on an empty utterance.
AffectScore lexicon_estimate(std::string_view utterance, const Lexicon& lexicon);

/// Loads the lexicon shipped in the data directory.
const Lexicon& shipped_lexicon();

}  // namespace hapticaffect
