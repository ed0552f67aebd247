#include "scsl/metrics/ideology.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "scsl/core/error.hpp"
#include "scsl/core/io.hpp"
#include "scsl/core/parallel.hpp"
#include "scsl/core/summation.hpp"
#include "scsl/core/text.hpp"

namespace scsl::metrics {

namespace {

double checked(double value, const char* what) {
  if (!std::isfinite(value) || value < -1.0 || value > 1.0) {
    throw ProtocolError(std::string(what) + " scorer returned " + std::to_string(value) + ", outside [-1, 1]");
  }
  return value;
}

}  // namespace

double iss(std::string_view text, const IssConfig& cfg, const scorer::StanceScorer& scorer) {
  CompensatedSum conservative;
  for (const auto& target : cfg.targets.conservative) {
    conservative.add(checked(scorer.score_stance(target, text), "stance"));
  }
  CompensatedSum liberal;
  for (const auto& target : cfg.targets.liberal) liberal.add(checked(scorer.score_stance(target, text), "stance"));
  const double value = conservative.value() - liberal.value();
  return cfg.higher_is_conservative ? value : -value;
}

double hps(std::string_view text, const scorer::StanceScorer& scorer, bool higher_is_conservative) {
  const double value = checked(scorer.score_ideology(text), "ideology");
  return higher_is_conservative ? value : -value;
}

std::optional<Which> parse_which(std::string_view s) {
  if (s == "iss") return Which::iss;
  if (s == "hps") return Which::hps;
  if (s == "both") return Which::both;
  return std::nullopt;
}

std::optional<Metric> parse_metric(std::string_view s) {
  if (s == "iss") return Metric::iss;
  if (s == "hps") return Metric::hps;
  return std::nullopt;
}

std::optional<Aggregate> parse_aggregate(std::string_view s) {
  if (s == "mean") return Aggregate::mean;
  if (s == "median") return Aggregate::median;
  return std::nullopt;
}

JusticeYearScore justice_year_scores(const corpus::StatementPool& pool, const std::string& justice_id, int year,
                                     const YearScoreOptions& options, const IssConfig& cfg,
                                     const scorer::StanceScorer& scorer) {
  JusticeYearScore out;
  out.justice_id = justice_id;
  out.year = year;
  out.seed = options.seed;
  out.low_confidence = pool.available(justice_id, year) < options.min_statements;

  const auto sample = pool.sample(justice_id, year, options.n, options.seed);
  out.n_samples = sample.statements.size();
  if (sample.statements.empty()) return out;

  const bool want_iss = options.which != Which::hps;
  const bool want_hps = options.which != Which::iss;
  const std::size_t n = sample.statements.size();
  std::vector<double> iss_values(want_iss ? n : 0);
  std::vector<double> hps_values(want_hps ? n : 0);
  parallel_for(n, options.workers, [&](std::size_t i) {
    const auto& text = sample.statements[i].text;
    if (want_iss) iss_values[i] = iss(text, cfg, scorer);
    if (want_hps) hps_values[i] = hps(text, scorer, cfg.higher_is_conservative);
  });
  if (want_iss) out.iss = compensated_mean(iss_values);
  if (want_hps) out.hps = compensated_mean(hps_values);
  return out;
}

std::vector<JusticeYearScore> all_justice_year_scores(const corpus::StatementPool& pool,
                                                      const YearScoreOptions& options, const IssConfig& cfg,
                                                      const scorer::StanceScorer& scorer) {
  std::vector<JusticeYearScore> out;
  for (const auto& [justice, year] : pool.cells()) {
    out.push_back(justice_year_scores(pool, justice, year, options, cfg, scorer));
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty sequence");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double tenure_summary(std::span<const JusticeYearScore> scores, std::string_view justice_id, Metric metric,
                      Aggregate stat) {
  std::vector<double> yearly;
  for (const auto& s : scores) {
    if (s.justice_id != justice_id) continue;
    if (const auto v = s.value(metric)) yearly.push_back(*v);
  }
  if (yearly.empty()) throw ValidationError("no scored years for justice '" + std::string(justice_id) + "'");
  return stat == Aggregate::mean ? compensated_mean(yearly) : median(std::move(yearly));
}

std::string serialize(const JusticeYearScore& s) {
  nlohmann::ordered_json j;
  j["justice_id"] = s.justice_id;
  j["year"] = s.year;
  j["iss"] = s.iss ? nlohmann::ordered_json(*s.iss) : nlohmann::ordered_json(nullptr);
  j["hps"] = s.hps ? nlohmann::ordered_json(*s.hps) : nlohmann::ordered_json(nullptr);
  j["n_samples"] = s.n_samples;
  j["seed"] = s.seed;
  j["low_confidence"] = s.low_confidence;
  return j.dump();
}

JusticeYearScore parse_justice_year_score(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    JusticeYearScore s;
    s.justice_id = j.at("justice_id").get<std::string>();
    s.year = j.at("year").get<int>();
    if (!j.at("iss").is_null()) s.iss = j.at("iss").get<double>();
    if (!j.at("hps").is_null()) s.hps = j.at("hps").get<double>();
    s.n_samples = j.at("n_samples").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.low_confidence = j.value("low_confidence", false);
    if (s.justice_id.empty()) throw ValidationError("empty justice_id");
    if ((s.iss || s.hps) && s.n_samples == 0) throw ValidationError("scores present with n_samples = 0");
    if (s.hps && (*s.hps < -1.0 || *s.hps > 1.0)) throw ValidationError("hps outside [-1, 1]");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad score record: ") + e.what());
  }
}

std::vector<JusticeYearScore> load_justice_year_scores(const std::string& path) {
  std::vector<JusticeYearScore> out;
  std::size_t lineno = 0;
  for (const auto& line : io::read_lines(path)) {
    ++lineno;
    if (text::is_blank(line)) continue;
    try {
      out.push_back(parse_justice_year_score(line));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace scsl::metrics
