#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace scsl::text {

/// Byte range [begin, end) of one whitespace-delimited token.
struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Splits on Unicode whitespace (UTF-8 input). Offsets are byte offsets.
std::vector<TokenRange> whitespace_tokens(std::string_view text);

std::vector<std::string_view> split_whitespace(std::string_view text);

/// Strips leading/trailing non-alphanumeric characters and lowercases.
/// Bytes >= 0x80 count as alphanumeric so non-ASCII letters survive.
std::string normalize_token(std::string_view raw);

/// Whitespace split followed by normalize_token; empty results dropped.
std::vector<std::string> tokenize(std::string_view text);

std::string_view trim(std::string_view s);

bool is_blank(std::string_view s);

/// byte_offsets[i] is the byte offset of code point i; the final entry is
/// text.size(), so the vector has (code point count + 1) entries.
std::vector<std::size_t> codepoint_byte_offsets(std::string_view text);

}  // namespace scsl::text
