#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scsl/corpus/types.hpp"

namespace scsl::corpus {

struct RecordError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct IngestReport {
  std::size_t ingested = 0;
  std::vector<RecordError> errors;
};

/// Parsers for single line-delimited records. Throw ValidationError.
Statement parse_statement(std::string_view line);
Opinion parse_opinion(std::string_view line);
CaseMeta parse_case_meta(std::string_view line);

std::string serialize(const Statement& s);
std::string serialize(const Opinion& o);
std::string serialize(const CaseMeta& c);

/// Which CSV columns hold entity, year and value. An empty entity column
/// means the whole table belongs to MetricSeries::kGlobalEntity.
struct ColumnMapping {
  std::string entity;
  std::string year;
  std::string value;
};

struct MetricTable {
  MetricSeries series;
  std::vector<RecordError> rejected;  // line numbers count the header as 1
};

/// Parses a comma-separated table with a header row. Rows with unparsable
/// year/value are rejected individually; a duplicate (entity, year) is fatal.
MetricTable ingest_metric_table(const std::filesystem::path& path, std::string series_name,
                                const ColumnMapping& mapping);

/// Holds transcripts, opinions and case metadata. Written once during
/// ingestion, read-only afterwards.
class CorpusStore {
 public:
  IngestReport ingest_transcripts(const std::filesystem::path& path);
  IngestReport ingest_opinions(const std::filesystem::path& path);
  /// Duplicate case ids are reported as record errors; the first one wins.
  IngestReport ingest_cases(const std::filesystem::path& path);

  [[nodiscard]] const std::vector<Statement>& statements() const { return statements_; }
  [[nodiscard]] const std::vector<Opinion>& opinions() const { return opinions_; }
  [[nodiscard]] const std::map<std::string, CaseMeta>& cases() const { return cases_; }
  [[nodiscard]] const CaseMeta* find_case(const std::string& case_id) const;

  void add(Statement s) { statements_.push_back(std::move(s)); }
  void add(Opinion o) { opinions_.push_back(std::move(o)); }
  /// Throws ValidationError if the case id is already present.
  void add(CaseMeta c);

  /// Stable sort of statements and opinions by case id.
  void canonicalize();

  /// Writes transcripts.jsonl, opinions.jsonl and cases.jsonl in canonical
  /// order. Re-ingesting the directory reproduces the canonical store.
  void export_to(const std::filesystem::path& dir) const;

  friend bool operator==(const CorpusStore&, const CorpusStore&) = default;

 private:
  std::vector<Statement> statements_;
  std::vector<Opinion> opinions_;
  std::map<std::string, CaseMeta> cases_;
};

/// Keeps statements whose normalized tokens hit the lexicon; order preserved.
std::vector<Statement> emotion_filter(std::span<const Statement> statements, const EmotionLexicon& lexicon);

bool has_lexicon_word(std::string_view text, const EmotionLexicon& lexicon);

struct StatementSample {
  std::vector<Statement> statements;
  bool empty_pool = false;  // no statements for the (justice, year) cell
};

/// Emotion-filtered justice statements grouped by (justice, year).
/// Advocate and unattributed speech never enters the pool.
class StatementPool {
 public:
  StatementPool(const CorpusStore& store, const EmotionLexicon& lexicon);
  explicit StatementPool(std::span<const Statement> filtered);

  /// Uniform sample without replacement of min(n, available) statements.
  /// The stream depends only on (seed, justice, year).
  [[nodiscard]] StatementSample sample(const std::string& justice_id, int year, std::size_t n,
                                       std::uint64_t seed) const;

  [[nodiscard]] std::size_t available(const std::string& justice_id, int year) const;
  [[nodiscard]] std::vector<std::pair<std::string, int>> cells() const;
  [[nodiscard]] std::size_t size() const { return statements_.size(); }

 private:
  void index();

  std::vector<Statement> statements_;
  std::map<std::pair<std::string, int>, std::vector<std::size_t>> cells_;
};

}  // namespace scsl::corpus
