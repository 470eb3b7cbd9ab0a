#pragma once

// UTF-8 helpers shared by the parser, the label normalizer and the tokenizer.
// Character classes are approximations good enough for Latin, Greek and
// Cyrillic scripts; no locale is consulted.

#include <string>
#include <string_view>

namespace bannerscope::text {

inline constexpr char32_t kReplacementChar = 0xFFFD;

/// Replaces every invalid UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view input);

/// Decodes UTF-8; invalid sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view input);

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view input);

bool is_space(char32_t cp);
/// Letter or digit in any script we classify.
bool is_word_char(char32_t cp);
char32_t to_lower(char32_t cp);

std::string to_lower(std::string_view utf8);

/// Collapses whitespace runs (including no-break spaces) to one ASCII space
/// and trims both ends.
std::string collapse_whitespace(std::string_view utf8);

/// Number of code points in a UTF-8 string.
std::size_t length(std::string_view utf8);

} // namespace bannerscope::text
