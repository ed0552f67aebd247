#include "scsl/core/text.hpp"

#include <cstdint>

namespace scsl::text {
namespace {

// Decodes one UTF-8 code point at `pos`; returns its length in bytes.
// Invalid sequences are treated as a single byte.
std::size_t decode(std::string_view s, std::size_t pos, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  std::size_t len = 1;
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    cp = 0xFFFD;
    return 1;
  }
  if (pos + len > s.size()) {
    cp = 0xFFFD;
    return 1;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[pos + k]);
    if ((b & 0xC0) != 0x80) {
      cp = 0xFFFD;
      return 1;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  return len;
}

bool is_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_alnum_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

std::vector<TokenRange> whitespace_tokens(std::string_view text) {
  std::vector<TokenRange> out;
  std::size_t pos = 0;
  bool in_token = false;
  std::size_t start = 0;
  while (pos < text.size()) {
    char32_t cp = 0;
    const std::size_t len = decode(text, pos, cp);
    if (is_space(cp)) {
      if (in_token) out.push_back({start, pos});
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      start = pos;
    }
    pos += len;
  }
  if (in_token) out.push_back({start, text.size()});
  return out;
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> out;
  for (const auto& r : whitespace_tokens(text)) out.push_back(text.substr(r.begin, r.end - r.begin));
  return out;
}

std::string normalize_token(std::string_view raw) {
  std::size_t b = 0;
  std::size_t e = raw.size();
  while (b < e && !is_alnum_byte(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && !is_alnum_byte(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string out(raw.substr(b, e - b));
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto piece : split_whitespace(text)) {
    auto tok = normalize_token(piece);
    if (!tok.empty()) out.push_back(std::move(tok));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto tokens = whitespace_tokens(s);
  if (tokens.empty()) return s.substr(0, 0);
  return s.substr(tokens.front().begin, tokens.back().end - tokens.front().begin);
}

bool is_blank(std::string_view s) { return whitespace_tokens(s).empty(); }

std::vector<std::size_t> codepoint_byte_offsets(std::string_view text) {
  std::vector<std::size_t> offsets;
  offsets.reserve(text.size() + 1);
  std::size_t pos = 0;
  while (pos < text.size()) {
    offsets.push_back(pos);
    char32_t cp = 0;
    pos += decode(text, pos, cp);
  }
  offsets.push_back(text.size());
  return offsets;
}

}  // namespace scsl::text
