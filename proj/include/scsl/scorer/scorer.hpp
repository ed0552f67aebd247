#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scsl/scorer/models.hpp"
#include "scsl/scorer/tfidf.hpp"

namespace scsl::scorer {

/// Continuous stance/ideology scorer. Outputs are finite and in [-1, 1].
class StanceScorer {
 public:
  virtual ~StanceScorer() = default;
  virtual double score_stance(std::string_view target, std::string_view text) const = 0;
  virtual double score_ideology(std::string_view text) const = 0;
};

/// Anything that assigns a discrete label to a (target, text) pair.
class LabelPredictor {
 public:
  virtual ~LabelPredictor() = default;
  virtual std::string predict_label(std::string_view target, std::string_view text) const = 0;
};

enum class Convention {
  signed_predicted,  // +p(pos) if the positive class wins, -p(neg) otherwise
  expectation,       // p(pos) - p(neg)
};

std::string_view to_string(Convention c);
std::optional<Convention> parse_convention(std::string_view s);

/// Maps a binary probability vector [p_neg, p_pos] to [-1, 1]. An exact tie
/// under signed_predicted yields 0. Throws ValidationError for non-binary input.
double signed_score(std::span<const double> proba, Convention convention);

/// A scorer that exposes binary class probabilities; score_* derive from them.
class ProbabilisticScorer : public StanceScorer {
 public:
  explicit ProbabilisticScorer(Convention convention) : convention_(convention) {}

  virtual std::vector<double> stance_proba(std::string_view target, std::string_view text) const = 0;
  virtual std::vector<double> ideology_proba(std::string_view text) const = 0;

  double score_stance(std::string_view target, std::string_view text) const override {
    return signed_score(stance_proba(target, text), convention_);
  }
  double score_ideology(std::string_view text) const override {
    return signed_score(ideology_proba(text), convention_);
  }

  [[nodiscard]] Convention convention() const { return convention_; }

 private:
  Convention convention_;
};

enum class Task { stance, ideology };

std::string_view to_string(Task t);
std::optional<Task> parse_task(std::string_view s);

using ModelHead = std::variant<LinearModel, MlpModel, MajorityModel>;

/// A fitted vocabulary plus a classification head.
struct Classifier {
  Task task = Task::stance;
  TfidfVocab vocab;
  ModelHead head;

  [[nodiscard]] const std::vector<std::string>& labels() const;
  [[nodiscard]] std::string_view kind() const;
  [[nodiscard]] std::vector<double> proba(std::string_view target, std::string_view text) const;
};

inline constexpr std::string_view kModelMagic = "SCSL1";
inline constexpr int kModelFormatVersion = 1;

/// Text format: the magic line, then one JSON document holding vocab + head.
std::string serialize_classifier(const Classifier& c);
Classifier parse_classifier(std::string_view contents);
void save_classifier(const Classifier& c, const std::filesystem::path& path);
Classifier load_classifier(const std::filesystem::path& path);

/// Built-in scorer over a trained classifier. Stance mode featurizes
/// (target, text); ideology mode uses an empty target.
class BuiltinScorer final : public ProbabilisticScorer, public LabelPredictor {
 public:
  BuiltinScorer(std::shared_ptr<const Classifier> classifier, Convention convention);

  std::vector<double> stance_proba(std::string_view target, std::string_view text) const override;
  std::vector<double> ideology_proba(std::string_view text) const override;
  std::string predict_label(std::string_view target, std::string_view text) const override;

  [[nodiscard]] const Classifier& classifier() const { return *classifier_; }

 private:
  std::shared_ptr<const Classifier> classifier_;
};

}  // namespace scsl::scorer
