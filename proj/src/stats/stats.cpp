#include "scsl/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scsl/core/error.hpp"
#include "scsl/core/parallel.hpp"
#include "scsl/core/random.hpp"
#include "scsl/core/summation.hpp"

namespace scsl::stats {
namespace {

// |statistic| ties within this slack count as "at least as extreme".
constexpr double kTieSlack = 1e-12;

struct Centered {
  std::vector<double> x;
  std::vector<double> y;
  double denom = 0.0;
};

Centered center(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ValidationError("correlated series differ in length");
  if (xs.size() < 3) throw ValidationError("correlation needs n >= 3, got " + std::to_string(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw ValidationError("non-finite value in correlated series");
  }
  const double mx = compensated_mean(xs);
  const double my = compensated_mean(ys);
  Centered c;
  c.x.reserve(xs.size());
  c.y.reserve(ys.size());
  CompensatedSum sxx;
  CompensatedSum syy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    c.x.push_back(xs[i] - mx);
    c.y.push_back(ys[i] - my);
    sxx.add(c.x.back() * c.x.back());
    syy.add(c.y.back() * c.y.back());
  }
  if (!(sxx.value() > 0.0) || !(syy.value() > 0.0)) throw ValidationError("correlation undefined: zero variance");
  c.denom = std::sqrt(sxx.value()) * std::sqrt(syy.value());
  return c;
}

double dot(std::span<const double> a, std::span<const double> b) {
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

double clamp_r(double r) { return std::clamp(r, -1.0, 1.0); }

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

std::string_view to_string(PValueMethod m) { return m == PValueMethod::permutation ? "permutation" : "t_approx"; }

std::optional<PValueMethod> parse_pvalue_method(std::string_view s) {
  if (s == "permutation") return PValueMethod::permutation;
  if (s == "t_approx") return PValueMethod::t_approx;
  return std::nullopt;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double df) {
  if (!(df > 0.0)) throw ValidationError("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  // P(|T| >= |t|) = I_{df / (df + t^2)}(df / 2, 1 / 2)
  return std::clamp(incomplete_beta(0.5 * df, 0.5, df / (df + t * t)), 0.0, 1.0);
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  const auto c = center(xs, ys);
  return clamp_r(dot(c.x, c.y) / c.denom);
}

CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys, const CorrelationOptions& options) {
  const auto c = center(xs, ys);
  CorrelationResult res;
  res.r = clamp_r(dot(c.x, c.y) / c.denom);
  res.n = xs.size();
  res.method = options.method;
  res.seed = options.seed;

  if (options.method == PValueMethod::t_approx) {
    const double df = static_cast<double>(res.n) - 2.0;
    const double one_minus = 1.0 - res.r * res.r;
    res.p_value = one_minus <= 0.0 ? 0.0 : student_t_two_sided(res.r * std::sqrt(df / one_minus), df);
    return res;
  }

  if (options.permutations == 0) throw ValidationError("permutation test needs at least one permutation");
  const double observed = std::abs(dot(c.x, c.y) / c.denom);
  std::vector<char> extreme(options.permutations, 0);
  parallel_for(options.permutations, options.workers, [&](std::size_t i) {
    std::vector<double> y = c.y;
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(i)));
    shuffle(std::span(y), rng);
    extreme[i] = std::abs(dot(c.x, y) / c.denom) >= observed - kTieSlack ? 1 : 0;
  });
  const auto count = static_cast<double>(std::count(extreme.begin(), extreme.end(), 1));
  res.p_value = (1.0 + count) / (1.0 + static_cast<double>(options.permutations));
  return res;
}

AlignedSeries align_series(const corpus::MetricSeries& a, const corpus::MetricSeries& b, std::string_view entity_a,
                           std::string_view entity_b) {
  const auto ya = a.by_year(entity_a);
  const auto yb = b.by_year(entity_b);
  AlignedSeries out;
  for (const auto& [year, value] : ya) {
    const auto it = yb.find(year);
    if (it == yb.end()) {
      ++out.dropped_a;
      continue;
    }
    out.years.push_back(year);
    out.a.push_back(value);
    out.b.push_back(it->second);
  }
  out.dropped_b = yb.size() - out.years.size();
  if (out.years.empty()) {
    throw ValidationError("series '" + a.name() + "' (" + std::string(entity_a) + ") and '" + b.name() + "' (" +
                          std::string(entity_b) + ") share no years");
  }
  return out;
}

namespace {

// The mood table usually carries a single global entity; fall back to the
// only entity present when the table named one.
std::string mood_entity(const corpus::MetricSeries& mood) {
  const auto entities = mood.entities();
  if (entities.size() == 1) return entities.front();
  for (const auto& e : entities) {
    if (e == corpus::MetricSeries::kGlobalEntity) return e;
  }
  throw ValidationError("mood series must contain exactly one entity");
}

}  // namespace

ResponsivenessPartition responsiveness_partition(const corpus::MetricSeries& mq, const corpus::MetricSeries& mood,
                                                 double alpha, std::size_t min_years,
                                                 const CorrelationOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  ResponsivenessPartition part;
  part.alpha = alpha;
  part.min_years = std::max<std::size_t>(min_years, 3);
  const auto mood_id = mood_entity(mood);
  for (const auto& justice : mq.entities()) {
    AlignedSeries aligned;
    try {
      aligned = align_series(mq, mood, justice, mood_id);
    } catch (const ValidationError&) {
      part.excluded[justice] = "no overlapping years";
      continue;
    }
    if (aligned.years.size() < part.min_years) {
      part.excluded[justice] = "only " + std::to_string(aligned.years.size()) + " overlapping years";
      continue;
    }
    CorrelationOptions opts = options;
    opts.seed = derive_seed(options.seed, justice);
    CorrelationResult res;
    try {
      res = pearson(aligned.a, aligned.b, opts);
    } catch (const ValidationError& e) {
      part.excluded[justice] = e.what();
      continue;
    }
    res.seed = options.seed;
    part.per_justice[justice] = res;
    (res.p_value < alpha ? part.responsive : part.nonresponsive).insert(justice);
  }
  return part;
}

namespace {

double summarize(std::vector<double> values, metrics::Aggregate stat) {
  return stat == metrics::Aggregate::mean ? compensated_mean(values) : metrics::median(std::move(values));
}

GroupResult correlate_group(const std::set<std::string>& justices,
                            std::span<const metrics::JusticeYearScore> scores, metrics::Metric metric,
                            const corpus::MetricSeries& mq, metrics::Aggregate stat,
                            const CorrelationOptions& options) {
  GroupResult g;
  for (const auto& j : justices) {
    double language = 0.0;
    try {
      language = metrics::tenure_summary(scores, j, metric, stat);
    } catch (const ValidationError&) {
      g.missing.push_back(j);
      continue;
    }
    std::vector<double> mq_values;
    for (const auto& [year, v] : mq.by_year(j)) mq_values.push_back(v);
    if (mq_values.empty()) {
      g.missing.push_back(j);
      continue;
    }
    g.points.push_back({j, language, summarize(std::move(mq_values), stat)});
  }
  if (g.points.size() < 3) {
    g.flag = "group has " + std::to_string(g.points.size()) + " justices; need 3";
    return g;
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : g.points) {
    xs.push_back(p.language);
    ys.push_back(p.mq);
  }
  try {
    g.correlation = pearson(xs, ys, options);
  } catch (const ValidationError& e) {
    g.flag = e.what();
  }
  return g;
}

}  // namespace

GroupedCorrelation grouped_ideology_correlation(std::span<const metrics::JusticeYearScore> scores,
                                                metrics::Metric metric, const corpus::MetricSeries& mq,
                                                const ResponsivenessPartition& partition, metrics::Aggregate stat,
                                                const CorrelationOptions& options) {
  GroupedCorrelation out;
  out.responsive = correlate_group(partition.responsive, scores, metric, mq, stat, options);
  CorrelationOptions other = options;
  other.seed = derive_seed(options.seed, 1);
  out.nonresponsive = correlate_group(partition.nonresponsive, scores, metric, mq, stat, other);
  if (out.nonresponsive.correlation) out.nonresponsive.correlation->seed = options.seed;
  return out;
}

MetricAgreement iss_hps_agreement(std::span<const metrics::JusticeYearScore> scores, metrics::Aggregate stat,
                                  const CorrelationOptions& options) {
  std::set<std::string> justices;
  for (const auto& s : scores) justices.insert(s.justice_id);
  MetricAgreement out;
  for (const auto& j : justices) {
    try {
      const double i = metrics::tenure_summary(scores, j, metrics::Metric::iss, stat);
      const double h = metrics::tenure_summary(scores, j, metrics::Metric::hps, stat);
      out.justices.push_back(j);
      out.iss.push_back(i);
      out.hps.push_back(h);
    } catch (const ValidationError&) {
    }
  }
  if (out.justices.size() >= 3) {
    try {
      out.correlation = pearson(out.iss, out.hps, options);
    } catch (const ValidationError&) {
    }
  }
  return out;
}

SalienceAnalysis salience_politicality(std::span<const CaseScore> opinion_hps, const corpus::MetricSeries& salience,
                                       bool by_year, const CorrelationOptions& options) {
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& c : opinion_hps) {
    const auto points = salience.by_year(c.case_id);
    if (points.empty()) continue;
    const auto& [year, value] = *points.begin();
    auto& g = groups[by_year ? year : 0];
    g.first.push_back(std::abs(c.hps));
    g.second.push_back(value);
  }
  SalienceAnalysis out;
  for (const auto& [year, g] : groups) {
    if (g.first.size() < 3) {
      out.skipped[year] = "only " + std::to_string(g.first.size()) + " cases";
      continue;
    }
    CorrelationOptions opts = options;
    opts.seed = derive_seed(options.seed, static_cast<std::uint64_t>(year));
    try {
      auto res = pearson(g.first, g.second, opts);
      res.seed = options.seed;
      out.correlations.push_back({by_year ? std::optional<int>(year) : std::nullopt, res});
    } catch (const ValidationError& e) {
      out.skipped[year] = e.what();
    }
  }
  return out;
}

double accuracy_metric(std::span<const int> predictions, std::span<const int> golds) {
  if (golds.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) correct += predictions[i] == golds[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(golds.size());
}

double approx_randomization_test(const PairedMetric& metric, std::span<const int> preds_a,
                                 std::span<const int> preds_b, std::span<const int> golds,
                                 const RandomizationOptions& options) {
  if (preds_a.size() != golds.size() || preds_b.size() != golds.size()) {
    throw ValidationError("prediction vectors and golds differ in length");
  }
  if (options.iterations < 100) throw ValidationError("randomization test needs at least 100 iterations");
  const std::size_t n = golds.size();
  const double observed = std::abs(metric(preds_a, golds) - metric(preds_b, golds));

  auto extreme_for = [&](auto&& swapped) {
    std::vector<int> a(preds_a.begin(), preds_a.end());
    std::vector<int> b(preds_b.begin(), preds_b.end());
    for (std::size_t i = 0; i < n; ++i) {
      if (swapped(i)) std::swap(a[i], b[i]);
    }
    return std::abs(metric(a, golds) - metric(b, golds)) >= observed - kTieSlack;
  };

  const bool exhaustive = n < 63 && (std::uint64_t{1} << n) <= options.iterations;
  const std::size_t total = exhaustive ? static_cast<std::size_t>(std::uint64_t{1} << n) : options.iterations;
  std::vector<char> extreme(total, 0);
  parallel_for(total, options.workers, [&](std::size_t it) {
    if (exhaustive) {
      extreme[it] = extreme_for([it](std::size_t i) { return ((it >> i) & 1U) != 0; }) ? 1 : 0;
    } else {
      Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(it)));
      std::vector<char> flips(n);
      for (auto& f : flips) f = coin_flip(rng) ? 1 : 0;
      extreme[it] = extreme_for([&flips](std::size_t i) { return flips[i] != 0; }) ? 1 : 0;
    }
  });
  const auto count = static_cast<double>(std::count(extreme.begin(), extreme.end(), 1));
  if (exhaustive) return count / static_cast<double>(total);
  return (1.0 + count) / (1.0 + static_cast<double>(options.iterations));
}

}  // namespace scsl::stats
