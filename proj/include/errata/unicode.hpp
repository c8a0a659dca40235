#pragma once

#include <string>
#include <string_view>

namespace errata::unicode {

// Strict UTF-8 decoding; throws Error(InvalidUtf8) on malformed input.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);
std::string encode(char32_t cp);

// Canonical composition for the Latin letters the toolkit supports
// (base letter + grave/acute/circumflex/tilde/diaeresis/cedilla).
std::u32string compose(std::u32string_view text);

char32_t to_lower(char32_t cp) noexcept;
bool is_letter(char32_t cp) noexcept;
bool is_space(char32_t cp) noexcept;

// Number of code points in a UTF-8 string.
std::size_t length(std::string_view utf8);

}  // namespace errata::unicode
