#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scsl/scorer/sparse.hpp"

namespace scsl::scorer {

inline constexpr std::size_t kDefaultMaxVocab = 50'000;

/// Term -> (index, idf). Indices are dense in [0, size()).
class TfidfVocab {
 public:
  TfidfVocab() = default;
  TfidfVocab(std::vector<std::string> terms, std::vector<double> idf, std::size_t document_count);

  [[nodiscard]] std::size_t size() const { return terms_.size(); }
  [[nodiscard]] std::size_t document_count() const { return document_count_; }
  [[nodiscard]] const std::vector<std::string>& terms() const { return terms_; }
  [[nodiscard]] const std::vector<double>& idf() const { return idf_; }

  /// -1 when the term is out of vocabulary.
  [[nodiscard]] long index_of(std::string_view term) const;

  /// L2-normalized tf-idf of one text (raw counts times idf). Dimension size().
  [[nodiscard]] SparseVector transform(std::string_view text) const;

  friend bool operator==(const TfidfVocab& a, const TfidfVocab& b) {
    return a.terms_ == b.terms_ && a.idf_ == b.idf_ && a.document_count_ == b.document_count_;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::size_t document_count_ = 0;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Keeps the max_vocab terms with the highest document frequency (ties broken
/// lexicographically); idf(t) = ln((1 + N) / (1 + df(t))) + 1.
TfidfVocab fit_tfidf(std::span<const std::string> documents, std::size_t max_vocab = kDefaultMaxVocab);

/// [tfidf(target) ; tfidf(text)], each half normalized on its own.
SparseVector featurize(const TfidfVocab& vocab, std::string_view target, std::string_view text);

}  // namespace scsl::scorer
