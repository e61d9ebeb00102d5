#pragma once

#include <string>
#include <string_view>

namespace hapticaffect::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

/// Decodes one scalar value starting at `pos` and advances `pos`. Malformed
/// or overlong sequences and surrogates yield U+FFFD and consume one byte.
char32_t next(std::string_view text, std::size_t& pos) noexcept;

template <class Fn>
void for_each_scalar(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < text.size()) fn(next(text, pos));
}

void append(std::string& out, char32_t c);

}  // namespace hapticaffect::utf8
