#include "hapticaffect/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hapticaffect/error.hpp"

#ifndef HAPTICAFFECT_DATA_DIR
#define HAPTICAFFECT_DATA_DIR "data"
#endif

namespace hapticaffect {

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("HAPTICAFFECT_DATA_DIR"); env && *env) return env;
  return HAPTICAFFECT_DATA_DIR;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError("config key '" + std::string(key) + "': bad number '" + std::string(value) + "'");
  return out;
}

// Strips a trailing comment and surrounding quotes.
std::string_view unquote(std::string_view value) {
  value = trim(value);
  if (!value.empty() && value.front() == '"') {
    const auto close = value.find('"', 1);
    if (close == std::string_view::npos) throw ConfigError("unterminated string in config");
    return value.substr(1, close - 1);
  }
  if (auto hash = value.find('#'); hash != std::string_view::npos) value = trim(value.substr(0, hash));
  return value;
}

}  // namespace

AppConfig AppConfig::defaults() {
  AppConfig c;
  const auto dir = data_dir();
  c.prompt_path = dir / "prompt_template.txt";
  c.lexicon_path = dir / "lexicon.tsv";
  c.phrases_path = dir / "phrases.json";
  return c;
}

void AppConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = unquote(raw);
  if (key == "device") device = value;
  else if (key == "sample_rate") sample_rate = parse_number<int>(key, value);
  else if (key == "fade_ms") fade_ms = parse_number<double>(key, value);
  else if (key == "estimator") estimator.backend = parse_estimator_backend(value);
  else if (key == "model") estimator.model_name = value;
  else if (key == "endpoint") estimator.endpoint_url = value;
  else if (key == "max_retries") estimator.max_retries = parse_number<int>(key, value);
  else if (key == "timeout_ms") estimator.timeout = std::chrono::milliseconds(parse_number<long>(key, value));
  else if (key == "prompt_path") prompt_path = value;
  else if (key == "lexicon_path") lexicon_path = value;
  else if (key == "phrases_path") phrases_path = value;
  else if (key == "log_dir") log_dir = value;
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void AppConfig::validate() const {
  if (!is_supported_sample_rate(sample_rate))
    throw ConfigError("sample_rate must be 44100 or 48000, got " + std::to_string(sample_rate));
  if (!(fade_ms >= 0.0)) throw ConfigError("fade_ms must be >= 0");
  estimator.validate();
}

AppConfig AppConfig::parse(std::string_view text) {
  AppConfig c = defaults();
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view l = trim(line);
    if (l.empty() || l.front() == '#') continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    c.set(trim(l.substr(0, eq)), l.substr(eq + 1));
  }
  c.validate();
  return c;
}

AppConfig AppConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace hapticaffect
