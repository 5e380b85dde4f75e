#pragma once

#include <cstdint>
#include <string_view>

namespace bicot {

// Decodes the UTF-8 sequence starting at `pos`. On success advances `pos`
// past the sequence and returns the code point. On malformed input advances
// `pos` by one byte and returns the byte value (never fails).
char32_t decode_utf8(std::string_view text, std::size_t& pos);

bool is_valid_utf8(std::string_view text);

// CJK unified ideographs (incl. extension A) and compatibility ideographs.
bool is_cjk(char32_t cp);

bool is_unicode_space(char32_t cp);

}  // namespace bicot
