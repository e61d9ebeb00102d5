#include "hapticaffect/lexicon.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "hapticaffect/config.hpp"
#include "hapticaffect/error.hpp"

namespace hapticaffect {

namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '\'';
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

bool has_non_ascii(std::string_view s) {
  for (unsigned char c : s)
    if (c >= 0x80) return true;
  return false;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line_no) {
  field = trim(field);
  double v = 0.0;
  const char* first = field.data();
  if (!field.empty() && field.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v))
    throw ConfigError("lexicon line " + std::to_string(line_no) + ": bad number '" +
                      std::string(field) + "'");
  return v;
}

std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string_view::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

}  // namespace

Lexicon::Lexicon(std::string version, double scale) : version_(std::move(version)), scale_(scale) {
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw ConfigError("lexicon scale must be > 0");
}

void Lexicon::add(std::string token, LexiconEntry entry) {
  if (token.empty()) throw ConfigError("lexicon token is empty");
  if (has_non_ascii(token)) {
    phrases_.emplace_back(std::move(token), entry);
  } else {
    words_[lower_ascii(token)] = entry;
  }
}

Lexicon Lexicon::parse(std::string_view text) {
  std::optional<std::string> version;
  std::optional<double> scale;
  std::vector<std::pair<std::string, LexiconEntry>> rows;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }

    if (line.front() == '#') {
      std::string_view body = trim(line.substr(1));
      if (auto colon = body.find(':'); colon != std::string_view::npos) {
        std::string_view key = trim(body.substr(0, colon));
        std::string_view value = trim(body.substr(colon + 1));
        if (key == "version") version = std::string(value);
        if (key == "scale") scale = parse_number(value, line_no);
      }
    } else {
      const std::size_t t1 = line.find('\t');
      const std::size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
      if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos)
        throw ConfigError("lexicon line " + std::to_string(line_no) +
                          ": expected token<TAB>valence<TAB>arousal");
      std::string token(trim(line.substr(0, t1)));
      if (token.empty()) throw ConfigError("lexicon line " + std::to_string(line_no) + ": empty token");
      rows.emplace_back(std::move(token),
                        LexiconEntry{parse_number(line.substr(t1 + 1, t2 - t1 - 1), line_no),
                                     parse_number(line.substr(t2 + 1), line_no)});
    }
    if (end == text.size()) break;
  }

  if (!version) throw ConfigError("lexicon header lacks a 'version:' line");
  if (!scale) throw ConfigError("lexicon header lacks a 'scale:' line");

  Lexicon lex(*version, *scale);
  for (auto& [token, entry] : rows) lex.add(std::move(token), entry);
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read lexicon: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::vector<std::string> tokenize_words(std::string_view utterance) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < utterance.size()) {
    while (i < utterance.size() && !is_word_char(utterance[i])) ++i;
    std::size_t j = i;
    while (j < utterance.size() && is_word_char(utterance[j])) ++j;
    std::string_view word = utterance.substr(i, j - i);
    while (!word.empty() && word.front() == '\'') word.remove_prefix(1);
    while (!word.empty() && word.back() == '\'') word.remove_suffix(1);
    if (!word.empty()) tokens.push_back(lower_ascii(word));
    i = j;
  }
  return tokens;
}

LexiconEntry Lexicon::score(std::string_view utterance) const {
  LexiconEntry sum;
  for (const auto& token : tokenize_words(utterance)) {
    if (auto it = words_.find(token); it != words_.end()) {
      sum.valence += it->second.valence;
      sum.arousal += it->second.arousal;
    }
  }
  for (const auto& [token, entry] : phrases_) {
    const auto n = static_cast<double>(count_occurrences(utterance, token));
    sum.valence += n * entry.valence;
    sum.arousal += n * entry.arousal;
  }
  return sum;
}

double squash_percent(double weight_sum, double scale) noexcept {
  return 100.0 / (1.0 + std::exp(-weight_sum / scale));
}

AffectScore lexicon_estimate(std::string_view utterance, const Lexicon& lexicon) {
  if (utterance.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw InputError("utterance is empty");
  const LexiconEntry sum = lexicon.score(utterance);
  AffectScore s;
  s.pleasure = squash_percent(sum.valence, lexicon.scale());
  s.misery = 100.0 - s.pleasure;
  s.arousal = squash_percent(sum.arousal, lexicon.scale());
  s.sleepiness = 100.0 - s.arousal;
  return s;
}

const Lexicon& shipped_lexicon() {
  static const Lexicon lex = Lexicon::load(data_dir() / "lexicon.tsv");
  return lex;
}

}  // namespace hapticaffect
