#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semtex::text {

/// Byte offset of the first invalid UTF-8 sequence, or nullopt.
std::optional<std::size_t> find_invalid_utf8(std::string_view s);

/// Byte length of the UTF-8 sequence starting with `lead`.
std::size_t utf8_length(unsigned char lead);

/// Splits valid UTF-8 into one view per code point.
std::vector<std::string_view> codepoints(std::string_view s);

std::string trim(std::string_view s);
/// Collapses whitespace runs to one space (no trimming).
std::string collapse_space(std::string_view s);

bool is_ascii_letter(char c);
bool is_ascii_digit(char c);
bool is_space(char c);

/// Applies a TeX accent control symbol (`"`, `'`, `` ` ``, `^`, `~`) to a base
/// letter, e.g. ('"', "U") -> "Ü". Returns nullopt for unsupported pairs.
std::optional<std::string> apply_accent(char accent, std::string_view base);

/// Text replacements for argument-less control words in prose
/// (`\ldots` -> "…", `\ss` -> "ß"). Returns nullopt when unknown.
std::optional<std::string> control_word_text(std::string_view name);

/// Unicode superscript form of a string when every character has one.
std::optional<std::string> to_superscript(std::string_view s);

}  // namespace semtex::text
