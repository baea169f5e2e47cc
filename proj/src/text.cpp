#include "semtex/text.hpp"

#include <cstdint>
#include <map>
#include <utility>

namespace semtex::text {

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 0;
}

std::optional<std::size_t> find_invalid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = utf8_length(lead);
    if (len == 0 || i + len > s.size()) return i;
    std::uint32_t cp = len == 1 ? lead : (lead & (0x7F >> len));
    for (std::size_t k = 1; k < len; ++k) {
      auto c = static_cast<unsigned char>(s[i + k]);
      if ((c & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (c & 0x3F);
    }
    // Overlong encodings, surrogates, and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      return i;
    }
    i += len;
  }
  return std::nullopt;
}

std::vector<std::string_view> codepoints(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = utf8_length(static_cast<unsigned char>(s[i]));
    if (len == 0 || i + len > s.size()) len = 1;
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_space(std::string_view s) {
  std::string out;
  bool in_space = false;
  for (char c : s) {
    if (is_space(c)) {
      if (!in_space) out += ' ';
      in_space = true;
    } else {
      out += c;
      in_space = false;
    }
  }
  return out;
}

std::optional<std::string> apply_accent(char accent, std::string_view base) {
  static const std::map<std::pair<char, std::string_view>, std::string_view> table = {
      {{'"', "a"}, "ä"}, {{'"', "o"}, "ö"}, {{'"', "u"}, "ü"}, {{'"', "A"}, "Ä"},
      {{'"', "O"}, "Ö"}, {{'"', "U"}, "Ü"}, {{'"', "e"}, "ë"}, {{'"', "i"}, "ï"},
      {{'\'', "a"}, "á"}, {{'\'', "e"}, "é"}, {{'\'', "i"}, "í"}, {{'\'', "o"}, "ó"},
      {{'\'', "u"}, "ú"}, {{'\'', "E"}, "É"}, {{'`', "a"}, "à"}, {{'`', "e"}, "è"},
      {{'`', "u"}, "ù"}, {{'^', "a"}, "â"}, {{'^', "e"}, "ê"}, {{'^', "o"}, "ô"},
      {{'~', "n"}, "ñ"}, {{'~', "a"}, "ã"}, {{'~', "o"}, "õ"},
  };
  auto it = table.find({accent, base});
  if (it == table.end()) return std::nullopt;
  return std::string(it->second);
}

std::optional<std::string> control_word_text(std::string_view name) {
  static const std::map<std::string_view, std::string_view> table = {
      {"ldots", "…"}, {"dots", "…"}, {"ss", "ß"},   {"LaTeX", "LaTeX"}, {"TeX", "TeX"},
      {"&", "&"},     {"%", "%"},    {"$", "$"},    {"#", "#"},         {"_", "_"},
      {"{", "{"},     {"}", "}"},    {",", " "}, {" ", " "},        {"@", ""},
      {"/", ""},      {"-", ""},     {"quad", " "},  {"xspace", ""},
  };
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return std::string(it->second);
}

std::optional<std::string> to_superscript(std::string_view s) {
  static const std::map<std::string_view, std::string_view> table = {
      {"0", "⁰"}, {"1", "¹"}, {"2", "²"}, {"3", "³"}, {"4", "⁴"}, {"5", "⁵"},
      {"6", "⁶"}, {"7", "⁷"}, {"8", "⁸"}, {"9", "⁹"}, {"+", "⁺"}, {"-", "⁻"},
      {"−", "⁻"}, {"=", "⁼"}, {"(", "⁽"}, {")", "⁾"}, {"n", "ⁿ"}, {"i", "ⁱ"},
      {"*", "*"}, {"′", "′"},
  };
  std::string out;
  for (auto cp : codepoints(s)) {
    auto it = table.find(cp);
    if (it == table.end()) return std::nullopt;
    out += it->second;
  }
  return out;
}

}  // namespace semtex::text
