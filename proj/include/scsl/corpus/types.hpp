#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scsl::corpus {

inline constexpr int kMinYear = 1955;
inline constexpr int kMaxYear = 2100;

enum class SpeakerRole { justice, advocate, other };
enum class OpinionType { majority, concurring, dissenting, per_curiam };
enum class WinningParty { petitioner, respondent, unclear };

std::string_view to_string(SpeakerRole role);
std::string_view to_string(OpinionType type);
std::string_view to_string(WinningParty party);

std::optional<SpeakerRole> parse_speaker_role(std::string_view s);
std::optional<OpinionType> parse_opinion_type(std::string_view s);
std::optional<WinningParty> parse_winning_party(std::string_view s);

/// One oral-argument utterance.
struct Statement {
  std::string case_id;
  int year = 0;
  std::string speaker_id;
  SpeakerRole speaker_role = SpeakerRole::other;
  std::string text;

  friend bool operator==(const Statement&, const Statement&) = default;
};

struct Opinion {
  std::string case_id;
  int year = 0;
  std::string author_id;
  OpinionType opinion_type = OpinionType::majority;
  std::string text;

  /// Per-curiam opinions are stored but carry no authorial stance.
  [[nodiscard]] bool flagged() const { return opinion_type == OpinionType::per_curiam; }

  friend bool operator==(const Opinion&, const Opinion&) = default;
};

struct CaseMeta {
  std::string case_id;
  WinningParty winning_party = WinningParty::unclear;
  std::optional<std::string> legal_question;
  std::optional<double> salience;

  friend bool operator==(const CaseMeta&, const CaseMeta&) = default;
};

/// Word -> emotion tags. Lookup is case-insensitive.
class EmotionLexicon {
 public:
  /// NRC layout: word<TAB>emotion<TAB>flag, rows with flag 1 are kept.
  static EmotionLexicon load_tsv(const std::string& path);

  void add(std::string_view word, std::string_view emotion);
  [[nodiscard]] bool contains(std::string_view word) const;
  [[nodiscard]] const std::set<std::string>* tags(std::string_view word) const;
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] bool empty() const { return entries_.empty(); }

 private:
  std::map<std::string, std::set<std::string>, std::less<>> entries_;
};

/// Liberal (S_L) and conservative (S_C) target statements.
struct TargetSet {
  std::vector<std::string> liberal;
  std::vector<std::string> conservative;

  /// JSON object with string arrays `liberal` and `conservative`.
  static TargetSet load(const std::string& path);

  /// Throws ValidationError on empty strings or overlap between the lists.
  void validate() const;

  [[nodiscard]] TargetSet swapped() const { return {conservative, liberal}; }
};

/// Year-indexed values keyed by (entity, year).
class MetricSeries {
 public:
  /// Entity used for series with a single global entity (e.g. policy mood).
  static constexpr std::string_view kGlobalEntity = "*";

  MetricSeries() = default;
  explicit MetricSeries(std::string name) : name_(std::move(name)) {}

  [[nodiscard]] const std::string& name() const { return name_; }

  /// Throws ValidationError on a duplicate key or a non-finite value.
  void insert(std::string entity, int year, double value);

  [[nodiscard]] std::optional<double> get(std::string_view entity, int year) const;
  [[nodiscard]] std::map<int, double> by_year(std::string_view entity) const;
  [[nodiscard]] std::vector<std::string> entities() const;
  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] const std::map<std::pair<std::string, int>, double>& points() const { return points_; }

 private:
  std::string name_;
  std::map<std::pair<std::string, int>, double> points_;
};

}  // namespace scsl::corpus
