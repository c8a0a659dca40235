#include "errata/unicode.hpp"

#include "errata/error.hpp"

namespace errata::unicode {

std::u32string decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) {
    const auto lead = static_cast<unsigned char>(utf8[i]);
    char32_t cp = 0;
    std::size_t extra = 0;
    if (lead < 0x80) {
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      cp = lead & 0x1F;
      extra = 1;
    } else if ((lead & 0xF0) == 0xE0) {
      cp = lead & 0x0F;
      extra = 2;
    } else if ((lead & 0xF8) == 0xF0) {
      cp = lead & 0x07;
      extra = 3;
    } else {
      throw Error(Errc::InvalidUtf8, "invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    for (std::size_t k = 1; k <= extra; ++k) {
      if (i + k >= utf8.size()) {
        throw Error(Errc::InvalidUtf8, "truncated UTF-8 sequence at offset " + std::to_string(i));
      }
      const auto cont = static_cast<unsigned char>(utf8[i + k]);
      if ((cont & 0xC0) != 0x80) {
        throw Error(Errc::InvalidUtf8, "invalid UTF-8 continuation at offset " + std::to_string(i + k));
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
    static constexpr char32_t kMinForLength[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLength[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      throw Error(Errc::InvalidUtf8, "invalid code point at offset " + std::to_string(i));
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) out += encode(cp);
  return out;
}

namespace {

struct Composition {
  char32_t base;
  char32_t mark;
  char32_t composed;
};

// Latin-1 precomposed letters and their canonical decompositions.
constexpr Composition kCompositions[] = {
    {U'A', 0x300, 0xC0}, {U'A', 0x301, 0xC1}, {U'A', 0x302, 0xC2}, {U'A', 0x303, 0xC3},
    {U'A', 0x308, 0xC4}, {U'C', 0x327, 0xC7}, {U'E', 0x300, 0xC8}, {U'E', 0x301, 0xC9},
    {U'E', 0x302, 0xCA}, {U'E', 0x308, 0xCB}, {U'I', 0x300, 0xCC}, {U'I', 0x301, 0xCD},
    {U'I', 0x302, 0xCE}, {U'I', 0x308, 0xCF}, {U'N', 0x303, 0xD1}, {U'O', 0x300, 0xD2},
    {U'O', 0x301, 0xD3}, {U'O', 0x302, 0xD4}, {U'O', 0x303, 0xD5}, {U'O', 0x308, 0xD6},
    {U'U', 0x300, 0xD9}, {U'U', 0x301, 0xDA}, {U'U', 0x302, 0xDB}, {U'U', 0x308, 0xDC},
    {U'Y', 0x301, 0xDD}, {U'a', 0x300, 0xE0}, {U'a', 0x301, 0xE1}, {U'a', 0x302, 0xE2},
    {U'a', 0x303, 0xE3}, {U'a', 0x308, 0xE4}, {U'c', 0x327, 0xE7}, {U'e', 0x300, 0xE8},
    {U'e', 0x301, 0xE9}, {U'e', 0x302, 0xEA}, {U'e', 0x308, 0xEB}, {U'i', 0x300, 0xEC},
    {U'i', 0x301, 0xED}, {U'i', 0x302, 0xEE}, {U'i', 0x308, 0xEF}, {U'n', 0x303, 0xF1},
    {U'o', 0x300, 0xF2}, {U'o', 0x301, 0xF3}, {U'o', 0x302, 0xF4}, {U'o', 0x303, 0xF5},
    {U'o', 0x308, 0xF6}, {U'u', 0x300, 0xF9}, {U'u', 0x301, 0xFA}, {U'u', 0x302, 0xFB},
    {U'u', 0x308, 0xFC}, {U'y', 0x301, 0xFD}, {U'y', 0x308, 0xFF},
};

bool is_combining_mark(char32_t cp) noexcept { return cp >= 0x300 && cp <= 0x36F; }

}  // namespace

std::u32string compose(std::u32string_view text) {
  std::u32string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    if (is_combining_mark(cp) && !out.empty()) {
      bool merged = false;
      for (const auto& c : kCompositions) {
        if (c.base == out.back() && c.mark == cp) {
          out.back() = c.composed;
          merged = true;
          break;
        }
      }
      if (merged) continue;
    }
    out.push_back(cp);
  }
  return out;
}

char32_t to_lower(char32_t cp) noexcept {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

bool is_letter(char32_t cp) noexcept {
  if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) return true;
  // Latin-1 Supplement letters, excluding the multiplication and division signs.
  return cp >= 0xC0 && cp <= 0xFF && cp != 0xD7 && cp != 0xF7;
}

bool is_space(char32_t cp) noexcept {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\v' ||
         cp == U'\f' || cp == 0xA0;
}

std::size_t length(std::string_view utf8) {
  std::size_t n = 0;
  for (char c : utf8) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

}  // namespace errata::unicode
