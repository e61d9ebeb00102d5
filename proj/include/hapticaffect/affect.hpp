#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace hapticaffect {

/// Circumplex affect estimate as four percentages. Each axis (pleasure /
/// misery, arousal / sleepiness) sums to 100.
struct AffectScore {
  double pleasure = 50.0;
  double misery = 50.0;
  double arousal = 50.0;
  double sleepiness = 50.0;

  /// Valence as used by the frequency mapping.
  double valence() const noexcept { return pleasure; }

  bool is_valid(double tolerance = 1e-6) const noexcept;

  friend bool operator==(const AffectScore&, const AffectScore&) = default;
};

/// The five-part estimator prompt, plus the note about the input language.
struct PromptSpec {
  std::string objective;
  std::string model_explanation;
  std::string procedure_criteria;
  std::string output_format;
  std::string considerations;
  std::string language_note;
};

/// Exact response template the estimator is asked to follow.
inline constexpr std::string_view kAffectTemplate =
    "Pleasure: XX.X%, Misery: YY.Y%, Arousal: ZZ.Z%, Sleepiness: AA.A%";

PromptSpec default_prompt_spec();

/// Reads a prompt template file made of `[[section]]` markers followed by the
/// section body. Unknown sections and missing sections are configuration
/// errors; a `# version:` line before the first marker is recorded.
PromptSpec load_prompt_spec(const std::filesystem::path& path);
PromptSpec parse_prompt_template(std::string_view text);

/// Concatenates the sections in order: objective, model explanation,
/// procedure and criteria, output format, considerations (language note
/// last). Throws ConfigError if any section is empty.
std::string build_prompt(const PromptSpec& spec);

/// Extracts the four labelled percentages from free-form estimator output.
/// Axes off by at most 1.0 from 100 are rescaled proportionally; anything
/// else malformed throws ParseError carrying `raw`.
AffectScore parse_affect_response(std::string_view raw);

/// Formats `score` into the response template with one decimal per field.
std::string format_affect_response(const AffectScore& score);

}  // namespace hapticaffect
