#include "scsl/corpus/store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "json.hpp"
#include "scsl/core/error.hpp"
#include "scsl/core/io.hpp"
#include "scsl/core/random.hpp"
#include "scsl/core/text.hpp"

namespace scsl::corpus {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_object(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error&) {
    throw ValidationError("not valid JSON");
  }
  if (!obj.is_object()) throw ValidationError("record is not a JSON object");
  return obj;
}

std::string require_string(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(std::string("missing field '") + key + "'");
  if (!it->is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::string require_nonempty(const json& obj, const char* key) {
  auto value = require_string(obj, key);
  if (text::is_blank(value)) throw ValidationError(std::string("field '") + key + "' is empty");
  return value;
}

int require_year(const json& obj) {
  const auto it = obj.find("year");
  if (it == obj.end()) throw ValidationError("missing field 'year'");
  if (!it->is_number_integer()) throw ValidationError("field 'year' must be an integer");
  return it->get<int>();
}

}  // namespace

Statement parse_statement(std::string_view line) {
  const auto obj = parse_object(line);
  Statement s;
  s.case_id = require_nonempty(obj, "case_id");
  s.year = require_year(obj);
  if (s.year < kMinYear || s.year > kMaxYear) {
    throw ValidationError("year " + std::to_string(s.year) + " outside [1955, 2100]");
  }
  s.speaker_id = require_nonempty(obj, "speaker_id");
  const auto role = require_string(obj, "speaker_role");
  const auto parsed = parse_speaker_role(role);
  if (!parsed) throw ValidationError("unknown speaker_role '" + role + "'");
  s.speaker_role = *parsed;
  s.text = require_nonempty(obj, "text");
  return s;
}

Opinion parse_opinion(std::string_view line) {
  const auto obj = parse_object(line);
  Opinion o;
  o.case_id = require_nonempty(obj, "case_id");
  o.year = require_year(obj);
  o.author_id = require_string(obj, "author_id");
  const auto type = require_string(obj, "opinion_type");
  const auto parsed = parse_opinion_type(type);
  if (!parsed) throw ValidationError("unknown opinion_type '" + type + "'");
  o.opinion_type = *parsed;
  o.text = require_nonempty(obj, "text");
  return o;
}

CaseMeta parse_case_meta(std::string_view line) {
  const auto obj = parse_object(line);
  CaseMeta c;
  c.case_id = require_nonempty(obj, "case_id");
  const auto party = require_string(obj, "winning_party");
  const auto parsed = parse_winning_party(party);
  if (!parsed) throw ValidationError("unknown winning_party '" + party + "'");
  c.winning_party = *parsed;
  if (const auto it = obj.find("legal_question"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError("field 'legal_question' must be a string or null");
    if (!text::is_blank(it->get<std::string>())) c.legal_question = it->get<std::string>();
  }
  if (const auto it = obj.find("salience"); it != obj.end() && !it->is_null()) {
    if (!it->is_number()) throw ValidationError("field 'salience' must be a number or null");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw ValidationError("field 'salience' must be finite");
    c.salience = v;
  }
  return c;
}

std::string serialize(const Statement& s) {
  ordered_json j;
  j["case_id"] = s.case_id;
  j["year"] = s.year;
  j["speaker_id"] = s.speaker_id;
  j["speaker_role"] = to_string(s.speaker_role);
  j["text"] = s.text;
  return j.dump();
}

std::string serialize(const Opinion& o) {
  ordered_json j;
  j["case_id"] = o.case_id;
  j["year"] = o.year;
  j["author_id"] = o.author_id;
  j["opinion_type"] = to_string(o.opinion_type);
  j["text"] = o.text;
  return j.dump();
}

std::string serialize(const CaseMeta& c) {
  ordered_json j;
  j["case_id"] = c.case_id;
  j["winning_party"] = to_string(c.winning_party);
  j["legal_question"] = c.legal_question ? ordered_json(*c.legal_question) : ordered_json(nullptr);
  j["salience"] = c.salience ? ordered_json(*c.salience) : ordered_json(nullptr);
  return j.dump();
}

namespace {

template <typename Parse, typename Sink>
IngestReport ingest_lines(const std::filesystem::path& path, Parse parse, Sink sink) {
  IngestReport report;
  const auto lines = io::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::is_blank(lines[i])) continue;
    try {
      sink(parse(lines[i]));
      ++report.ingested;
    } catch (const ValidationError& e) {
      report.errors.push_back({i + 1, e.what()});
    }
  }
  return report;
}

}  // namespace

IngestReport CorpusStore::ingest_transcripts(const std::filesystem::path& path) {
  return ingest_lines(path, parse_statement, [this](Statement s) { add(std::move(s)); });
}

IngestReport CorpusStore::ingest_opinions(const std::filesystem::path& path) {
  return ingest_lines(path, parse_opinion, [this](Opinion o) { add(std::move(o)); });
}

IngestReport CorpusStore::ingest_cases(const std::filesystem::path& path) {
  return ingest_lines(path, parse_case_meta, [this](CaseMeta c) { add(std::move(c)); });
}

void CorpusStore::add(CaseMeta c) {
  if (cases_.contains(c.case_id)) throw ValidationError("duplicate case_id '" + c.case_id + "'");
  auto id = c.case_id;
  cases_.emplace(std::move(id), std::move(c));
}

const CaseMeta* CorpusStore::find_case(const std::string& case_id) const {
  const auto it = cases_.find(case_id);
  return it == cases_.end() ? nullptr : &it->second;
}

void CorpusStore::canonicalize() {
  std::stable_sort(statements_.begin(), statements_.end(),
                   [](const Statement& a, const Statement& b) { return a.case_id < b.case_id; });
  std::stable_sort(opinions_.begin(), opinions_.end(),
                   [](const Opinion& a, const Opinion& b) { return a.case_id < b.case_id; });
}

void CorpusStore::export_to(const std::filesystem::path& dir) const {
  CorpusStore canonical = *this;
  canonical.canonicalize();
  std::string out;
  for (const auto& s : canonical.statements_) out += serialize(s) + "\n";
  io::write_file_atomic(dir / "transcripts.jsonl", out);
  out.clear();
  for (const auto& o : canonical.opinions_) out += serialize(o) + "\n";
  io::write_file_atomic(dir / "opinions.jsonl", out);
  out.clear();
  for (const auto& [id, c] : canonical.cases_) out += serialize(c) + "\n";
  io::write_file_atomic(dir / "cases.jsonl", out);
}

MetricTable ingest_metric_table(const std::filesystem::path& path, std::string series_name,
                                const ColumnMapping& mapping) {
  MetricTable table{MetricSeries(std::move(series_name)), {}};
  const auto lines = io::read_lines(path);
  if (lines.empty()) throw ValidationError(path.string() + ": missing header row");

  const auto header = io::split_csv_line(lines.front());
  auto column = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (text::trim(header[i]) == name) return i;
    }
    throw ValidationError(path.string() + ": no column named '" + name + "'");
  };
  const bool global = mapping.entity.empty();
  const std::size_t entity_col = global ? 0 : column(mapping.entity);
  const std::size_t year_col = column(mapping.year);
  const std::size_t value_col = column(mapping.value);

  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (text::is_blank(lines[i])) continue;
    const auto fields = io::split_csv_line(lines[i]);
    const std::size_t lineno = i + 1;
    const std::size_t needed = std::max({global ? 0 : entity_col, year_col, value_col}) + 1;
    if (fields.size() < needed) {
      table.rejected.push_back({lineno, "too few columns"});
      continue;
    }
    const auto year_text = text::trim(fields[year_col]);
    int year = 0;
    const auto [yp, yec] = std::from_chars(year_text.data(), year_text.data() + year_text.size(), year);
    if (yec != std::errc{} || yp != year_text.data() + year_text.size()) {
      table.rejected.push_back({lineno, "non-integer year '" + std::string(year_text) + "'"});
      continue;
    }
    const std::string value_text(text::trim(fields[value_col]));
    double value = 0.0;
    std::size_t consumed = 0;
    try {
      value = std::stod(value_text, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (value_text.empty() || consumed != value_text.size() || !std::isfinite(value)) {
      table.rejected.push_back({lineno, "non-numeric value '" + value_text + "'"});
      continue;
    }
    std::string entity = global ? std::string(MetricSeries::kGlobalEntity) : std::string(text::trim(fields[entity_col]));
    if (entity.empty()) {
      table.rejected.push_back({lineno, "empty entity"});
      continue;
    }
    // Duplicate keys propagate: the series would be ambiguous.
    table.series.insert(std::move(entity), year, value);
  }
  return table;
}

bool has_lexicon_word(std::string_view text, const EmotionLexicon& lexicon) {
  for (const auto& tok : text::tokenize(text)) {
    if (lexicon.contains(tok)) return true;
  }
  return false;
}

std::vector<Statement> emotion_filter(std::span<const Statement> statements, const EmotionLexicon& lexicon) {
  if (lexicon.empty()) throw ValidationError("emotion lexicon is empty");
  std::vector<Statement> out;
  for (const auto& s : statements) {
    if (has_lexicon_word(s.text, lexicon)) out.push_back(s);
  }
  return out;
}

StatementPool::StatementPool(const CorpusStore& store, const EmotionLexicon& lexicon)
    : statements_(emotion_filter(store.statements(), lexicon)) {
  index();
}

StatementPool::StatementPool(std::span<const Statement> filtered)
    : statements_(filtered.begin(), filtered.end()) {
  index();
}

void StatementPool::index() {
  for (std::size_t i = 0; i < statements_.size(); ++i) {
    const auto& s = statements_[i];
    if (s.speaker_role != SpeakerRole::justice) continue;
    cells_[{s.speaker_id, s.year}].push_back(i);
  }
}

StatementSample StatementPool::sample(const std::string& justice_id, int year, std::size_t n,
                                      std::uint64_t seed) const {
  if (n == 0) throw ValidationError("sample size must be >= 1");
  StatementSample out;
  const auto it = cells_.find({justice_id, year});
  if (it == cells_.end() || it->second.empty()) {
    out.empty_pool = true;
    return out;
  }
  std::vector<std::size_t> idx = it->second;
  const std::size_t k = std::min(n, idx.size());
  Rng rng(derive_seed(derive_seed(seed, justice_id), static_cast<std::uint64_t>(year)));
  // Partial Fisher-Yates: the first k slots become the sample.
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(rng, idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  out.statements.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.statements.push_back(statements_[idx[i]]);
  return out;
}

std::size_t StatementPool::available(const std::string& justice_id, int year) const {
  const auto it = cells_.find({justice_id, year});
  return it == cells_.end() ? 0 : it->second.size();
}

std::vector<std::pair<std::string, int>> StatementPool::cells() const {
  std::vector<std::pair<std::string, int>> out;
  out.reserve(cells_.size());
  for (const auto& [key, idx] : cells_) out.push_back(key);
  return out;
}

}  // namespace scsl::corpus
