#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scsl/corpus/store.hpp"
#include "scsl/corpus/types.hpp"

namespace scsl::dataset {

enum class Label { pro, con, neutral };

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view s);

struct StanceExample {
  std::string case_id;
  std::string target;  // legal question
  std::string text;    // opinion text
  Label label = Label::pro;
  corpus::OpinionType opinion_type = corpus::OpinionType::majority;
  bool masked = false;

  friend bool operator==(const StanceExample&, const StanceExample&) = default;
};

/// pro = the opinion affirms the question. Questions are phrased so that
/// "yes" favors the petitioner; majority and concurring opinions follow the
/// disposition, dissents invert it. Unclear winners and per-curiam opinions
/// are skipped (nullopt).
std::optional<Label> infer_stance_label(corpus::WinningParty winner, corpus::OpinionType type);

struct BuildReport {
  std::size_t opinions = 0;
  std::size_t examples = 0;
  std::map<std::string, std::size_t> by_label;
  std::map<std::string, std::size_t> skipped;  // reason -> count

  [[nodiscard]] std::string to_json() const;
};

struct DatasetBuild {
  std::vector<StanceExample> examples;
  BuildReport report;
};

/// One example per opinion whose case has a legal question and a non-skip
/// label, in store order. Questions are matched by case id.
DatasetBuild build_dataset(const corpus::CorpusStore& store);

/// Appends floor(ratio * n) neutral examples, each pairing a uniformly chosen
/// opinion text with the question of a uniformly chosen different case.
std::vector<StanceExample> augment_neutral(std::span<const StanceExample> examples, double ratio,
                                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// Entity masking

inline constexpr std::string_view kLawEntity = "LAW";

/// Character span [start, end) in Unicode code points.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string entity_type;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

/// Replaces each whitespace token that overlaps a non-LAW span with
/// "[TYPE]". Tokens touching a LAW span are left alone, as is all
/// whitespace, so the token count never changes. Throws ValidationError on
/// out-of-range or overlapping spans.
std::string ner_mask(std::string_view text, std::span<const EntitySpan> spans);

class EntityTagger {
 public:
  virtual ~EntityTagger() = default;
  /// Sorted, non-overlapping spans.
  virtual std::vector<EntitySpan> tag(std::string_view text) const = 0;
};

/// Deterministic rule tagger: month-day-year dates and years (DATE), names
/// after honorifics (PERSON), "X v. Y" party names (ORG), capitalized runs
/// ending in Act/Amendment/Clause/Code (LAW), other capitalized runs of two
/// or more words (ORG).
class GazetteerTagger final : public EntityTagger {
 public:
  std::vector<EntitySpan> tag(std::string_view text) const override;
};

/// Entity span file: lines of {case_id, record_index, start, end, entity_type}.
/// Returns spans keyed by record index; case ids are checked against the
/// dataset when one is given.
std::map<std::size_t, std::vector<EntitySpan>> load_span_file(const std::filesystem::path& path,
                                                              std::span<const StanceExample> dataset = {});
std::string serialize_span(const std::string& case_id, std::size_t record_index, const EntitySpan& span);

/// Masks the text of every example; `spans` overrides the tagger per record.
std::vector<StanceExample> mask_examples(std::span<const StanceExample> examples, const EntityTagger& tagger,
                                         const std::map<std::size_t, std::vector<EntitySpan>>* spans = nullptr);

// ---------------------------------------------------------------------------
// Splitting and evaluation

struct DatasetSplit {
  std::vector<StanceExample> train;
  std::vector<StanceExample> test;
  std::vector<std::size_t> train_index;  // positions in the input sequence
  std::vector<std::size_t> test_index;
  std::uint64_t seed = 0;
  double fraction = 0.8;
};

/// Seeded shuffle then prefix split; round(fraction * n) examples go to train
/// (clamped so both sides are non-empty).
DatasetSplit split(std::span<const StanceExample> examples, double fraction, std::uint64_t seed);

enum class ClassSchema { binary, three };

std::optional<ClassSchema> parse_class_schema(std::string_view s);

/// Evaluation order: pro, con[, neutral].
std::vector<Label> schema_labels(ClassSchema schema);

/// Model class order: binary is [con, pro] (negative, positive); three-class
/// appends neutral.
std::vector<std::string> model_label_names(ClassSchema schema);
int model_class_index(Label label, ClassSchema schema);

struct EvalResult {
  std::vector<Label> labels;                       // row/column order
  std::vector<std::vector<std::size_t>> confusion;  // [gold][predicted]
  std::vector<double> per_class_f1;
  double macro_f1 = 0.0;
  double accuracy = 0.0;

  [[nodiscard]] std::string to_json() const;
};

/// Macro-F1 is the unweighted mean over every schema class; a class with
/// precision + recall = 0 contributes 0. Throws ValidationError on labels
/// outside the schema or length mismatch.
EvalResult evaluate(std::span<const Label> gold, std::span<const Label> predicted, ClassSchema schema);

/// Builds "target [SEP] text" and truncates to token_limit whitespace tokens.
std::string truncate_for_scorer(std::string_view target, std::string_view text, std::size_t token_limit);

// ---------------------------------------------------------------------------
// Dataset files: one JSON object per line with case_id, target, text, label,
// opinion_type, masked.

std::string serialize(const StanceExample& e);
StanceExample parse_stance_example(std::string_view line);
std::vector<StanceExample> load_dataset(const std::filesystem::path& path);
std::string dump_dataset(std::span<const StanceExample> examples);

}  // namespace scsl::dataset

namespace scsl::scorer {
class LabelPredictor;
}

namespace scsl::dataset {

/// Runs the predictor over each example; predicted strings must name a Label.
std::vector<Label> predict_labels(const scorer::LabelPredictor& predictor, std::span<const StanceExample> examples,
                                  std::size_t workers = 1);

}  // namespace scsl::dataset
