#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scsl/corpus/store.hpp"
#include "scsl/corpus/types.hpp"
#include "scsl/scorer/scorer.hpp"

namespace scsl::metrics {

struct IssConfig {
  corpus::TargetSet targets;
  scorer::Convention convention = scorer::Convention::signed_predicted;
  bool higher_is_conservative = true;
};

/// Issue-specific stance: agreement with conservative targets minus
/// agreement with liberal targets. Range [-|S_L|, |S_C|]; negated when
/// higher_is_conservative is false. Scorer errors propagate.
double iss(std::string_view text, const IssConfig& cfg, const scorer::StanceScorer& scorer);

/// Holistic political stance: the scorer's signed ideology output.
double hps(std::string_view text, const scorer::StanceScorer& scorer, bool higher_is_conservative = true);

enum class Which { iss, hps, both };
enum class Metric { iss, hps };
enum class Aggregate { mean, median };

std::optional<Which> parse_which(std::string_view s);
std::optional<Metric> parse_metric(std::string_view s);
std::optional<Aggregate> parse_aggregate(std::string_view s);

struct JusticeYearScore {
  std::string justice_id;
  int year = 0;
  std::optional<double> iss;
  std::optional<double> hps;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  bool low_confidence = false;

  [[nodiscard]] std::optional<double> value(Metric m) const { return m == Metric::iss ? iss : hps; }

  friend bool operator==(const JusticeYearScore&, const JusticeYearScore&) = default;
};

struct YearScoreOptions {
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  Which which = Which::both;
  std::size_t min_statements = 25;  // smaller pools are flagged low_confidence
  std::size_t workers = 1;
};

/// Mean per-statement score over the seeded sample for one (justice, year).
/// An empty pool yields absent scores and n_samples = 0.
JusticeYearScore justice_year_scores(const corpus::StatementPool& pool, const std::string& justice_id, int year,
                                     const YearScoreOptions& options, const IssConfig& cfg,
                                     const scorer::StanceScorer& scorer);

/// justice_year_scores for every (justice, year) cell of the pool, in
/// (justice, year) order.
std::vector<JusticeYearScore> all_justice_year_scores(const corpus::StatementPool& pool,
                                                      const YearScoreOptions& options, const IssConfig& cfg,
                                                      const scorer::StanceScorer& scorer);

/// Mean or median of one justice's yearly scores. Throws ValidationError if
/// the justice has no scored years.
double tenure_summary(std::span<const JusticeYearScore> scores, std::string_view justice_id, Metric metric,
                      Aggregate stat = Aggregate::mean);

double median(std::vector<double> values);

/// One line-delimited record: justice_id, year, iss, hps, n_samples, seed,
/// low_confidence (absent scores are null).
std::string serialize(const JusticeYearScore& s);
JusticeYearScore parse_justice_year_score(std::string_view line);
std::vector<JusticeYearScore> load_justice_year_scores(const std::string& path);

/// Routes stance and ideology calls to different scorers.
class CompositeScorer final : public scorer::StanceScorer {
 public:
  CompositeScorer(const scorer::StanceScorer& stance, const scorer::StanceScorer& ideology)
      : stance_(stance), ideology_(ideology) {}

  double score_stance(std::string_view target, std::string_view text) const override {
    return stance_.score_stance(target, text);
  }
  double score_ideology(std::string_view text) const override { return ideology_.score_ideology(text); }

 private:
  const scorer::StanceScorer& stance_;
  const scorer::StanceScorer& ideology_;
};

}  // namespace scsl::metrics
