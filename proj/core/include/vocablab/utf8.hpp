#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vocablab::utf8 {

// One decoding step. An invalid lead or truncated sequence yields a
// single-byte unit with valid == false.
struct Unit {
  std::string_view bytes;
  char32_t code_point = 0;
  bool valid = false;
};

// Decodes the unit starting at `pos`; `pos` must be < text.size().
Unit next_unit(std::string_view text, std::size_t pos);

template <typename F>
void for_each_unit(std::string_view text, F&& f) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    Unit u = next_unit(text, pos);
    pos += u.bytes.size();
    f(u);
  }
}

// Invalid bytes decode to U+FFFD.
std::u32string decode_lossy(std::string_view text);

void append(std::string& out, char32_t cp);
std::string encode(std::u32string_view text);

// Byte offset of the first invalid sequence, if any.
std::optional<std::size_t> first_invalid_offset(std::string_view text);

std::size_t length(std::string_view text);

// Whitespace as understood by Python's str.split(), which the reference
// MT scorers rely on.
bool is_space(char32_t cp);

}  // namespace vocablab::utf8
