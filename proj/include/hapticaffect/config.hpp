#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hapticaffect/estimator.hpp"
#include "hapticaffect/synth.hpp"

namespace hapticaffect {

/// Directory holding the shipped prompt template, lexicon and phrase set.
/// HAPTICAFFECT_DATA_DIR overrides the build-time location.
std::filesystem::path data_dir();

/// Runtime settings. Read from a flat `key = value` file (TOML subset:
/// strings may be double-quoted, `#` starts a comment).
///
///   device = "null"          # null | none | pipe:<command>
///   sample_rate = 44100
///   fade_ms = 5
///   estimator = "lexicon"    # lexicon | llm
///   model = "gpt-4o-mini"
///   endpoint = "https://api.openai.com/v1/chat/completions"
///   max_retries = 2
///   timeout_ms = 10000
///   prompt_path = ".../prompt_template.txt"
///   lexicon_path = ".../lexicon.tsv"
///   phrases_path = ".../phrases.json"
///   log_dir = "."
struct AppConfig {
  std::string device = "null";
  int sample_rate = kDefaultSampleRate;
  double fade_ms = 5.0;
  EstimatorConfig estimator{};
  std::filesystem::path prompt_path;
  std::filesystem::path lexicon_path;
  std::filesystem::path phrases_path;
  std::filesystem::path log_dir = ".";

  static AppConfig defaults();
  static AppConfig load(const std::filesystem::path& path);
  static AppConfig parse(std::string_view text);

  /// Applies one setting; ConfigError for unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  void validate() const;

  EnvelopeSpec envelope() const { return {fade_ms, fade_ms, EnvelopeShape::RaisedCosine}; }
};

}  // namespace hapticaffect
