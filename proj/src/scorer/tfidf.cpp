#include "scsl/scorer/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "scsl/core/error.hpp"
#include "scsl/core/text.hpp"

namespace scsl::scorer {

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dim, 0.0);
  for (const auto& [i, v] : entries) out[i] = v;
  return out;
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  SparseVector out;
  out.dim = dense.size();
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) out.entries.emplace_back(static_cast<std::uint32_t>(i), dense[i]);
  }
  return out;
}

TfidfVocab::TfidfVocab(std::vector<std::string> terms, std::vector<double> idf, std::size_t document_count)
    : terms_(std::move(terms)), idf_(std::move(idf)), document_count_(document_count) {
  if (terms_.size() != idf_.size()) throw ValidationError("vocabulary and idf lengths differ");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (idf_[i] < 0.0 || !std::isfinite(idf_[i])) throw ValidationError("idf weights must be finite and >= 0");
    if (!index_.emplace(terms_[i], i).second) throw ValidationError("duplicate vocabulary term '" + terms_[i] + "'");
  }
}

long TfidfVocab::index_of(std::string_view term) const {
  const auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

SparseVector TfidfVocab::transform(std::string_view text) const {
  std::map<std::uint32_t, double> counts;
  for (const auto& tok : text::tokenize(text)) {
    const long idx = index_of(tok);
    if (idx >= 0) counts[static_cast<std::uint32_t>(idx)] += 1.0;
  }
  SparseVector out;
  out.dim = size();
  double norm2 = 0.0;
  for (const auto& [i, c] : counts) {
    const double v = c * idf_[i];
    out.entries.emplace_back(i, v);
    norm2 += v * v;
  }
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& e : out.entries) e.second *= inv;
  }
  return out;
}

TfidfVocab fit_tfidf(std::span<const std::string> documents, std::size_t max_vocab) {
  if (max_vocab == 0) throw ValidationError("max_vocab must be >= 1");
  std::unordered_map<std::string, std::size_t> df;
  std::size_t nonempty = 0;
  for (const auto& doc : documents) {
    const auto tokens = text::tokenize(doc);
    if (!tokens.empty()) ++nonempty;
    const std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const auto& t : unique) ++df[t];
  }
  if (nonempty == 0) throw ValidationError("cannot fit tf-idf on an empty corpus");

  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > max_vocab) ranked.resize(max_vocab);

  const double n = static_cast<double>(documents.size());
  std::vector<std::string> terms;
  std::vector<double> idf;
  terms.reserve(ranked.size());
  idf.reserve(ranked.size());
  for (auto& [term, count] : ranked) {
    idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    terms.push_back(std::move(term));
  }
  return TfidfVocab(std::move(terms), std::move(idf), documents.size());
}

SparseVector featurize(const TfidfVocab& vocab, std::string_view target, std::string_view text) {
  const auto head = vocab.transform(target);
  const auto tail = vocab.transform(text);
  SparseVector out;
  out.dim = 2 * vocab.size();
  out.entries.reserve(head.entries.size() + tail.entries.size());
  out.entries = head.entries;
  const auto offset = static_cast<std::uint32_t>(vocab.size());
  for (const auto& [i, v] : tail.entries) out.entries.emplace_back(i + offset, v);
  return out;
}

}  // namespace scsl::scorer
