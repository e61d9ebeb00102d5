#include "hapticaffect/affect.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "hapticaffect/error.hpp"

namespace hapticaffect {

namespace {

constexpr double kAxisSlack = 1.0;

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool iequals_at(std::string_view hay, std::size_t pos, std::string_view needle) {
  if (pos + needle.size() > hay.size()) return false;
  for (std::size_t i = 0; i < needle.size(); ++i)
    if (ascii_lower(hay[pos + i]) != ascii_lower(needle[i])) return false;
  return true;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Skips ASCII whitespace and the UTF-8 ideographic space (U+3000).
std::size_t skip_space(std::string_view s, std::size_t pos) {
  while (pos < s.size()) {
    if (is_space(s[pos])) {
      ++pos;
    } else if (s.substr(pos, 3) == "\xE3\x80\x80") {
      pos += 3;
    } else {
      break;
    }
  }
  return pos;
}

// Accepts ':' or the full-width colon U+FF1A.
std::optional<std::size_t> skip_colon(std::string_view s, std::size_t pos) {
  if (pos < s.size() && s[pos] == ':') return pos + 1;
  if (s.substr(pos, 3) == "\xEF\xBC\x9A") return pos + 3;
  return std::nullopt;
}

enum class FieldStatus { Missing, NotNumeric, Found };

struct Field {
  FieldStatus status = FieldStatus::Missing;
  double value = 0.0;
};

// Finds the first `<label> : <number>` occurrence. A label that is part of a
// longer word, or not followed by a colon, is prose and is skipped.
Field find_field(std::string_view raw, std::string_view label) {
  Field result;
  for (std::size_t pos = 0; pos + label.size() <= raw.size(); ++pos) {
    if (!iequals_at(raw, pos, label)) continue;
    if (pos > 0 && std::isalpha(static_cast<unsigned char>(raw[pos - 1]))) continue;
    std::size_t p = skip_space(raw, pos + label.size());
    auto after_colon = skip_colon(raw, p);
    if (!after_colon) continue;
    p = skip_space(raw, *after_colon);
    const char* first = raw.data() + p;
    const char* last = raw.data() + raw.size();
    if (first != last && *first == '+') ++first;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::fixed);
    if (ec != std::errc{} || !std::isfinite(value)) {
      result.status = FieldStatus::NotNumeric;
      return result;
    }
    result.status = FieldStatus::Found;
    result.value = value;
    return result;
  }
  return result;
}

void renormalize_axis(double& a, double& b, std::string_view axis, std::string_view raw) {
  const double sum = a + b;
  if (!near(sum, 100.0, kAxisSlack)) {
    throw ParseError(std::string(axis) + " axis sums to " + std::to_string(sum) +
                         ", expected 100 +/- 1",
                     std::string(raw));
  }
  a = a * 100.0 / sum;
  b = b * 100.0 / sum;
}

}  // namespace

bool AffectScore::is_valid(double tolerance) const noexcept {
  for (double v : {pleasure, misery, arousal, sleepiness})
    if (!std::isfinite(v) || v < 0.0 || v > 100.0) return false;
  return near(pleasure + misery, 100.0, tolerance) && near(arousal + sleepiness, 100.0, tolerance);
}

PromptSpec default_prompt_spec() {
  PromptSpec spec;
  spec.objective =
      "Your task is to quantitatively assess the emotion expressed by the input text "
      "on the basis of Russell's circumplex model of affect, and to output the "
      "resulting emotional values.";
  spec.model_explanation =
      "Russell's circumplex model places every emotion on a plane spanned by two "
      "perpendicular axes: valence, from unpleasant to pleasant, and arousal, from "
      "deactivated to activated. Eight reference emotions lie on a circle around "
      "the origin at these angles: 0\xC2\xB0 pleasure, 45\xC2\xB0 excitement, "
      "90\xC2\xB0 arousal, 135\xC2\xB0 distress, 180\xC2\xB0 misery, "
      "225\xC2\xB0 depression, 270\xC2\xB0 sleepiness, 315\xC2\xB0 contentment.";
  spec.procedure_criteria =
      "1. Judge valence by counting words with a positive or negative tone and by "
      "the mood of the text as a whole.\n"
      "2. Judge arousal by how energetic or subdued the content is.\n"
      "3. Express each dimension as a pair of complementary percentages.";
  spec.output_format =
      "Output the emotional values in exactly this format:\n"
      "Pleasure: XX.X%, Misery: YY.Y%, Arousal: ZZ.Z%, Sleepiness: AA.A%\n"
      "Pleasure and Misery must total 100%, and Arousal and Sleepiness must total "
      "100%.";
  spec.considerations =
      "Adhere strictly to the output format and to the explanation of Russell's "
      "circumplex model above. Do not add any other text.";
  spec.language_note =
      "The input text will be in Japanese. An English translation may be supplied "
      "instead; evaluate it the same way.";
  return spec;
}

namespace {

struct SectionSlot {
  std::string_view name;
  std::string PromptSpec::*member;
};

constexpr std::array<SectionSlot, 6> kSections{{
    {"objective", &PromptSpec::objective},
    {"model_explanation", &PromptSpec::model_explanation},
    {"procedure_criteria", &PromptSpec::procedure_criteria},
    {"output_format", &PromptSpec::output_format},
    {"considerations", &PromptSpec::considerations},
    {"language_note", &PromptSpec::language_note},
}};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

PromptSpec parse_prompt_template(std::string_view text) {
  PromptSpec spec;
  std::array<bool, kSections.size()> seen{};
  std::string* current = nullptr;
  std::string body;

  auto flush = [&] {
    if (current) *current = trim(body);
    body.clear();
  };

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() > 4 && line.starts_with("[[") && line.ends_with("]]")) {
      flush();
      const std::string_view name = std::string_view(line).substr(2, line.size() - 4);
      current = nullptr;
      for (std::size_t i = 0; i < kSections.size(); ++i) {
        if (kSections[i].name == name) {
          if (seen[i]) throw ConfigError("prompt template: duplicate section [[" + std::string(name) + "]]");
          seen[i] = true;
          current = &(spec.*kSections[i].member);
        }
      }
      if (!current) throw ConfigError("prompt template: unknown section [[" + std::string(name) + "]]");
      continue;
    }
    if (!current) continue;  // preamble: comments / version line
    body += line;
    body += '\n';
  }
  flush();

  for (std::size_t i = 0; i < kSections.size(); ++i)
    if (!seen[i]) throw ConfigError("prompt template: missing section [[" + std::string(kSections[i].name) + "]]");
  return spec;
}

PromptSpec load_prompt_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read prompt template: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_prompt_template(ss.str());
}

std::string build_prompt(const PromptSpec& spec) {
  for (const auto& slot : kSections)
    if (trim(spec.*slot.member).empty())
      throw ConfigError("prompt section '" + std::string(slot.name) + "' is empty");

  std::string out;
  out += "# Objective\n" + spec.objective + "\n\n";
  out += "# Russell's circumplex model\n" + spec.model_explanation + "\n\n";
  out += "# Procedure and criteria\n" + spec.procedure_criteria + "\n\n";
  out += "# Output format\n" + spec.output_format + "\n\n";
  out += "# Important considerations\n" + spec.considerations + "\n" + spec.language_note + "\n";
  return out;
}

AffectScore parse_affect_response(std::string_view raw) {
  static constexpr std::array<std::string_view, 4> kLabels{"Pleasure", "Misery", "Arousal",
                                                           "Sleepiness"};
  std::array<double, 4> values{};
  for (std::size_t i = 0; i < kLabels.size(); ++i) {
    const Field f = find_field(raw, kLabels[i]);
    if (f.status == FieldStatus::Missing)
      throw ParseError("missing label '" + std::string(kLabels[i]) + "'", std::string(raw));
    if (f.status == FieldStatus::NotNumeric)
      throw ParseError("non-numeric value for '" + std::string(kLabels[i]) + "'", std::string(raw));
    if (f.value < 0.0 || f.value > 100.0)
      throw ParseError(std::string(kLabels[i]) + " outside [0, 100]", std::string(raw));
    values[i] = f.value;
  }

  AffectScore s{values[0], values[1], values[2], values[3]};
  renormalize_axis(s.pleasure, s.misery, "valence", raw);
  renormalize_axis(s.arousal, s.sleepiness, "arousal", raw);
  return s;
}

std::string format_affect_response(const AffectScore& s) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "Pleasure: %.1f%%, Misery: %.1f%%, Arousal: %.1f%%, Sleepiness: %.1f%%",
                s.pleasure, s.misery, s.arousal, s.sleepiness);
  return buf;
}

}  // namespace hapticaffect
