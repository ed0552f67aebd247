#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scsl/corpus/types.hpp"
#include "scsl/metrics/ideology.hpp"

namespace scsl::stats {

enum class PValueMethod { permutation, t_approx };

std::string_view to_string(PValueMethod m);
std::optional<PValueMethod> parse_pvalue_method(std::string_view s);

struct CorrelationOptions {
  PValueMethod method = PValueMethod::permutation;
  std::size_t permutations = 10'000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct CorrelationResult {
  double r = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  PValueMethod method = PValueMethod::permutation;
  std::uint64_t seed = 0;
};

/// Sample Pearson correlation. Throws ValidationError for n < 3, unequal
/// lengths or a constant series.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

/// Pearson r with a two-sided p-value. The permutation method shuffles ys
/// (iteration i uses a sub-seed derived from (seed, i)) and reports
/// (1 + #{|r_perm| >= |r|}) / (1 + permutations).
CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys,
                          const CorrelationOptions& options = {});

/// Two-sided p-value of Student's t with df degrees of freedom.
double student_t_two_sided(double t, double df);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

struct AlignedSeries {
  std::vector<int> years;
  std::vector<double> a;
  std::vector<double> b;
  std::size_t dropped_a = 0;  // years only in a
  std::size_t dropped_b = 0;
};

/// Inner join of two entities' yearly values, sorted by year. Throws
/// ValidationError when no year is shared.
AlignedSeries align_series(const corpus::MetricSeries& a, const corpus::MetricSeries& b, std::string_view entity_a,
                           std::string_view entity_b);

struct ResponsivenessPartition {
  std::set<std::string> responsive;
  std::set<std::string> nonresponsive;
  std::map<std::string, std::string> excluded;  // justice -> reason
  std::map<std::string, CorrelationResult> per_justice;
  double alpha = 0.05;
  std::size_t min_years = 5;
};

/// Per justice, correlates yearly MQ with the mood series over shared years;
/// responsive iff p < alpha. Justices with fewer than min_years shared years
/// (or a constant series) are excluded and reported.
ResponsivenessPartition responsiveness_partition(const corpus::MetricSeries& mq, const corpus::MetricSeries& mood,
                                                 double alpha, std::size_t min_years,
                                                 const CorrelationOptions& options = {});

struct JusticePoint {
  std::string justice_id;
  double language = 0.0;
  double mq = 0.0;
};

struct GroupResult {
  std::optional<CorrelationResult> correlation;  // absent when < 3 justices
  std::vector<JusticePoint> points;
  std::vector<std::string> missing;  // justices without language scores
  std::string flag;                  // why the correlation is absent
};

struct GroupedCorrelation {
  GroupResult responsive;
  GroupResult nonresponsive;
};

/// Within each responsiveness group, correlates per-justice tenure summaries
/// of the language metric with tenure summaries of MQ.
GroupedCorrelation grouped_ideology_correlation(std::span<const metrics::JusticeYearScore> scores,
                                                metrics::Metric metric, const corpus::MetricSeries& mq,
                                                const ResponsivenessPartition& partition,
                                                metrics::Aggregate stat = metrics::Aggregate::mean,
                                                const CorrelationOptions& options = {});

/// Per-justice tenure ISS against tenure HPS over justices with both.
struct MetricAgreement {
  std::optional<CorrelationResult> correlation;
  std::vector<std::string> justices;
  std::vector<double> iss;
  std::vector<double> hps;
};

MetricAgreement iss_hps_agreement(std::span<const metrics::JusticeYearScore> scores,
                                  metrics::Aggregate stat = metrics::Aggregate::mean,
                                  const CorrelationOptions& options = {});

struct CaseScore {
  std::string case_id;
  double hps = 0.0;
};

struct YearCorrelation {
  std::optional<int> year;  // absent for the pooled result
  CorrelationResult result;
};

struct SalienceAnalysis {
  std::vector<YearCorrelation> correlations;
  std::map<int, std::string> skipped;  // year -> reason
};

/// Correlates |HPS| of each case's opinions with the case's salience, per
/// year (years with < 3 cases skipped) or pooled.
SalienceAnalysis salience_politicality(std::span<const CaseScore> opinion_hps, const corpus::MetricSeries& salience,
                                       bool by_year, const CorrelationOptions& options = {});

/// metric(predictions, golds) -> score.
using PairedMetric = std::function<double(std::span<const int>, std::span<const int>)>;

struct RandomizationOptions {
  std::size_t iterations = 10'000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// Two-sided approximate randomization test for metric(a) - metric(b).
/// Each iteration swaps every example's pair of predictions with
/// probability 1/2; p = (1 + #{|delta| >= |delta_obs|}) / (1 + iterations).
/// When 2^n <= iterations every swap pattern is enumerated instead and the
/// exact p-value #{|delta| >= |delta_obs|} / 2^n is returned.
double approx_randomization_test(const PairedMetric& metric, std::span<const int> preds_a,
                                 std::span<const int> preds_b, std::span<const int> golds,
                                 const RandomizationOptions& options = {});

double accuracy_metric(std::span<const int> predictions, std::span<const int> golds);

}  // namespace scsl::stats
