#include <algorithm>

#include "doctest.h"
#include "fake_scorers.hpp"
#include "scsl/core/error.hpp"
#include "scsl/core/random.hpp"
#include "scsl/metrics/ideology.hpp"

using namespace scsl;
using namespace scsl::metrics;
using corpus::SpeakerRole;
using corpus::Statement;
using testing::TableScorer;

namespace {

IssConfig config(std::vector<std::string> lib, std::vector<std::string> cons) {
  IssConfig c;
  c.targets = {std::move(lib), std::move(cons)};
  return c;
}

std::vector<Statement> pool_of(const std::vector<std::string>& texts, const std::string& justice = "j1",
                               int year = 2000) {
  std::vector<Statement> out;
  for (const auto& t : texts) out.push_back({"c1", year, justice, SpeakerRole::justice, t});
  return out;
}

YearScoreOptions opts(std::size_t n, Which which = Which::hps) {
  YearScoreOptions o;
  o.n = n;
  o.seed = 4;
  o.which = which;
  return o;
}

}  // namespace

TEST_CASE("iss examples") {
  TableScorer table;
  table.stance = {{"c1", 0.8}, {"c2", 0.8}, {"l1", -0.5}, {"l2", -0.5}};
  CHECK(iss("text", config({"l1", "l2"}, {"c1", "c2"}), table) == doctest::Approx(2.6).epsilon(1e-12));
  CHECK(iss("text", config({}, {}), table) == 0.0);

  TableScorer constant;
  constant.fallback = 0.37;
  CHECK(iss("text", config({"a", "b"}, {"c", "d"}), constant) == 0.0);

  auto flipped = config({"l1", "l2"}, {"c1", "c2"});
  flipped.higher_is_conservative = false;
  CHECK(iss("text", flipped, table) == doctest::Approx(-2.6).epsilon(1e-12));
}

TEST_CASE("iss antisymmetry and bound") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const testing::HashScorer scorer(rng());
    std::vector<std::string> lib, cons;
    for (std::size_t i = uniform_index(rng, 6); i > 0; --i) lib.push_back("L" + std::to_string(rng()));
    for (std::size_t i = uniform_index(rng, 6); i > 0; --i) cons.push_back("C" + std::to_string(rng()));
    const auto text = "statement " + std::to_string(rng());
    const auto cfg = config(lib, cons);
    const auto swapped = config(cons, lib);
    const double a = iss(text, cfg, scorer);
    CHECK(std::abs(a + iss(text, swapped, scorer)) <= 1e-12);
    CHECK(std::abs(a) <= static_cast<double>(lib.size() + cons.size()));
  }
}

TEST_CASE("scorer failures propagate") {
  const testing::FailingScorer failing;
  CHECK_THROWS(iss("t", config({"a"}, {"b"}), failing));
  CHECK_THROWS(hps("t", failing));
  TableScorer broken;
  broken.fallback = 3.0;
  CHECK_THROWS_AS(hps("t", broken), ProtocolError);
}

TEST_CASE("hps examples") {
  using scorer::Convention;
  CHECK(hps("t", testing::FixedProbaScorer(0.5, 0.5, Convention::expectation)) == 0.0);
  CHECK(hps("t", testing::FixedProbaScorer(0.1, 0.9, Convention::signed_predicted)) == doctest::Approx(0.9));
  CHECK(hps("t", testing::FixedProbaScorer(0.1, 0.9, Convention::signed_predicted), false) == doctest::Approx(-0.9));
}

TEST_CASE("justice-year means") {
  TableScorer table;
  table.ideology = {{"only", 0.4}};
  const corpus::StatementPool one(pool_of({"only"}));
  const auto s = justice_year_scores(one, "j1", 2000, opts(10), {}, table);
  CHECK(*s.hps == doctest::Approx(0.4));
  CHECK(s.n_samples == 1);
  CHECK(!s.iss);
  CHECK(s.low_confidence);

  table.ideology = {{"up", 0.2}, {"down", -0.2}};
  const corpus::StatementPool two(pool_of({"up", "down"}));
  CHECK(*justice_year_scores(two, "j1", 2000, opts(10), {}, table).hps == doctest::Approx(0.0));

  std::vector<std::string> texts;
  table.ideology.clear();
  for (int i = 1; i <= 10; ++i) {
    texts.push_back("s" + std::to_string(i));
    table.ideology[texts.back()] = 0.1 * i;
  }
  const corpus::StatementPool ten(pool_of(texts));
  CHECK(*justice_year_scores(ten, "j1", 2000, opts(10), {}, table).hps == doctest::Approx(0.55).epsilon(1e-12));

  const auto empty = justice_year_scores(ten, "j9", 2000, opts(10), {}, table);
  CHECK(!empty.hps);
  CHECK(empty.n_samples == 0);
}

TEST_CASE("aggregation ignores order and worker count") {
  std::vector<std::string> texts;
  for (int i = 0; i < 400; ++i) texts.push_back("statement number " + std::to_string(i));
  const testing::HashScorer scorer(5);
  auto cfg = config({"l1", "l2"}, {"c1"});
  auto forward = pool_of(texts);
  auto backward = forward;
  std::reverse(backward.begin(), backward.end());
  auto o = opts(400, Which::both);
  const auto a = justice_year_scores(corpus::StatementPool(forward), "j1", 2000, o, cfg, scorer);
  const auto b = justice_year_scores(corpus::StatementPool(backward), "j1", 2000, o, cfg, scorer);
  CHECK(std::abs(*a.hps - *b.hps) <= 1e-12);
  CHECK(std::abs(*a.iss - *b.iss) <= 1e-12);

  o.n = 50;
  const corpus::StatementPool pool(forward);
  const auto serial = justice_year_scores(pool, "j1", 2000, o, cfg, scorer);
  o.workers = 6;
  CHECK(justice_year_scores(pool, "j1", 2000, o, cfg, scorer) == serial);
}

TEST_CASE("tenure summaries") {
  std::vector<JusticeYearScore> s = {{"j1", 2000, std::nullopt, 0.1, 1, 0, false},
                                     {"j1", 2001, std::nullopt, 0.3, 1, 0, false},
                                     {"j2", 2000, std::nullopt, 0.1, 1, 0, false},
                                     {"j2", 2001, std::nullopt, 0.2, 1, 0, false},
                                     {"j2", 2002, std::nullopt, 0.9, 1, 0, false},
                                     {"j3", 2005, std::nullopt, -0.4, 1, 0, false}};
  CHECK(tenure_summary(s, "j1", Metric::hps) == doctest::Approx(0.2));
  CHECK(tenure_summary(s, "j2", Metric::hps, Aggregate::median) == doctest::Approx(0.2));
  CHECK(tenure_summary(s, "j3", Metric::hps) == -0.4);
  CHECK_THROWS_AS(tenure_summary(s, "j1", Metric::iss), ValidationError);
  CHECK_THROWS_AS(tenure_summary(s, "j4", Metric::hps), ValidationError);
}

TEST_CASE("score record round trip") {
  const JusticeYearScore s{"j1", 2003, -0.125, std::nullopt, 40, 7, false};
  const auto line = serialize(s);
  CHECK(line == R"({"justice_id":"j1","year":2003,"iss":-0.125,"hps":null,"n_samples":40,"seed":7,"low_confidence":false})");
  CHECK(parse_justice_year_score(line) == s);
}
