#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace lexivar::unicode {

/// Offset of the first byte that breaks UTF-8 well-formedness, if any.
std::optional<std::size_t> find_invalid_utf8(std::string_view text);

inline bool is_valid_utf8(std::string_view text) { return !find_invalid_utf8(text).has_value(); }

/// Decodes the code point starting at `pos` and advances `pos` past it.
/// Input must be valid UTF-8.
char32_t decode_next(std::string_view text, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

/// Unicode White_Space property (PropList.txt).
bool is_white_space(char32_t cp);

/// Full Unicode lowercase mapping (root locale).
std::string to_lower(std::string_view text);

}  // namespace lexivar::unicode
