#pragma once

// Straightforward reference implementations used to cross-check the library.

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scsl/core/random.hpp"
#include "scsl/dataset/dataset.hpp"

namespace scsl::testing {

struct BruteEval {
  std::vector<std::vector<std::size_t>> confusion;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
};

inline BruteEval brute_evaluate(const std::vector<dataset::Label>& gold, const std::vector<dataset::Label>& pred,
                                const std::vector<dataset::Label>& classes) {
  BruteEval out;
  const std::size_t k = classes.size();
  out.confusion.assign(k, std::vector<std::size_t>(k, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (std::size_t g = 0; g < k; ++g) {
      for (std::size_t p = 0; p < k; ++p) {
        if (gold[i] == classes[g] && pred[i] == classes[p]) ++out.confusion[g][p];
      }
    }
    if (gold[i] == pred[i]) ++correct;
  }
  double f1_sum = 0.0;
  for (const auto c : classes) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (pred[i] == c && gold[i] == c) tp += 1;
      if (pred[i] == c && gold[i] != c) fp += 1;
      if (pred[i] != c && gold[i] == c) fn += 1;
    }
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    f1_sum += precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
  }
  out.macro_f1 = f1_sum / static_cast<double>(k);
  out.accuracy = gold.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(gold.size());
  return out;
}

// Decoded code points of a UTF-8 string (input assumed valid).
inline std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    const std::size_t len = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

inline bool fuzz_space(const std::string& ch) {
  return ch == " " || ch == "\t" || ch == "\n" || ch == "\xc2\xa0" || ch == "\xe3\x80\x80";
}

struct CharToken {
  std::size_t begin = 0;  // code points
  std::size_t end = 0;
  std::string text;
};

inline std::vector<CharToken> char_tokens(const std::vector<std::string>& chars) {
  std::vector<CharToken> out;
  for (std::size_t i = 0; i < chars.size();) {
    if (fuzz_space(chars[i])) {
      ++i;
      continue;
    }
    CharToken t{i, i, ""};
    while (i < chars.size() && !fuzz_space(chars[i])) t.text += chars[i++];
    t.end = i;
    out.push_back(t);
  }
  return out;
}

// Masks per the contract: LAW overlap keeps the token, otherwise the first
// overlapping span (by start) names the replacement.
inline std::string oracle_mask(std::string_view text, std::vector<dataset::EntitySpan> spans) {
  std::sort(spans.begin(), spans.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  const auto chars = utf8_chars(text);
  std::string out;
  std::size_t cursor = 0;
  for (const auto& tok : char_tokens(chars)) {
    for (; cursor < tok.begin; ++cursor) out += chars[cursor];
    const dataset::EntitySpan* first = nullptr;
    bool law = false;
    for (const auto& s : spans) {
      if (s.start < tok.end && tok.begin < s.end) {
        if (s.entity_type == dataset::kLawEntity) law = true;
        else if (first == nullptr) first = &s;
      }
    }
    out += first != nullptr && !law ? "[" + first->entity_type + "]" : tok.text;
    cursor = tok.end;
  }
  for (; cursor < chars.size(); ++cursor) out += chars[cursor];
  return out;
}

struct FuzzCase {
  std::string text;
  std::vector<dataset::EntitySpan> spans;
};

inline FuzzCase fuzz_mask_case(Rng& rng) {
  static const std::vector<std::string> alphabet = {"a", "B", "z", "7", ".", ",", "(", "\xc3\xa9", "\xe2\x82\xac",
                                                    "\xf0\x9f\x98\x80", "-", "'"};
  static const std::vector<std::string> spaces = {" ", " ", " ", "\t", "\n", "\xc2\xa0", "\xe3\x80\x80"};
  static const std::vector<std::string> types = {"DATE", "PERSON", "ORG", "LAW", "GPE"};
  FuzzCase c;
  std::size_t length = 0;
  const auto n = 1 + uniform_index(rng, 60);
  for (std::size_t i = 0; i < n; ++i) {
    c.text += uniform_index(rng, 4) == 0 ? spaces[uniform_index(rng, spaces.size())]
                                         : alphabet[uniform_index(rng, alphabet.size())];
    ++length;
  }
  std::size_t pos = 0;
  while (pos < length) {
    pos += uniform_index(rng, 8);
    if (pos >= length) break;
    const auto end = std::min(length, pos + 1 + static_cast<std::size_t>(uniform_index(rng, 10)));
    c.spans.push_back({pos, end, types[uniform_index(rng, types.size())]});
    pos = end;
  }
  // Unsorted input is allowed.
  shuffle(std::span(c.spans), rng);
  return c;
}

}  // namespace scsl::testing
