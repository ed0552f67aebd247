#include <cmath>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mock_scorer.hpp"
#include "scsl/core/error.hpp"
#include "scsl/core/parallel.hpp"
#include "scsl/scorer/remote.hpp"

using namespace scsl;
using namespace scsl::scorer;
using testing::MockScorer;

namespace {

RemoteOptions fast() {
  RemoteOptions o;
  o.timeout = std::chrono::milliseconds(500);
  o.retries = 2;
  o.retry_backoff = std::chrono::milliseconds(1);
  return o;
}

MockScorer::Handler fixed(std::string body, int status = 200) {
  return [body, status](const httplib::Request&, httplib::Response& res) {
    res.status = status;
    res.set_content(body, "application/json");
  };
}

}  // namespace

TEST_CASE("request body layout") {
  CHECK(build_score_request(std::string_view("q"), "t", RemoteMode::stance) ==
        R"({"text":"t","target":"q","mode":"stance"})");
  CHECK(build_score_request(std::nullopt, "t", RemoteMode::ideology) ==
        R"({"text":"t","target":null,"mode":"ideology"})");
}

TEST_CASE("response validation") {
  CHECK(parse_score_response(R"({"score":0.25})").score == 0.25);
  const auto full = parse_score_response(R"({"score":-0.6,"label":"con","proba":{"con":0.8,"pro":0.2}})");
  CHECK(full.label == "con");
  CHECK(full.proba.at("pro") == 0.2);
  CHECK_THROWS_AS(parse_score_response(R"({"score":1.7})"), ProtocolError);
  CHECK_THROWS_AS(parse_score_response(R"({"score":"0.1"})"), ProtocolError);
  CHECK_THROWS_AS(parse_score_response(R"({"label":"pro"})"), ProtocolError);
  CHECK_THROWS_AS(parse_score_response("not json"), ProtocolError);
  CHECK_THROWS_AS(parse_score_response(R"({"score":0.1,"proba":{"a":0.5,"b":0.6}})"), ProtocolError);
}

TEST_CASE("score pass-through from a mock server") {
  MockScorer mock(fixed(R"({"score":0.25,"label":"pro","proba":{"con":0.375,"pro":0.625}})"));
  const RemoteScorer scorer(mock.url(), fast());
  CHECK(scorer.score_stance("q", "t") == 0.25);
  CHECK(scorer.score_ideology("t") == 0.25);
  CHECK(scorer.predict_label("q", "t") == "pro");
  CHECK(scorer.healthy());
}

TEST_CASE("server sees the protocol fields") {
  std::string seen;
  MockScorer mock([&seen](const httplib::Request& req, httplib::Response& res) {
    seen = req.body;
    res.set_content(R"({"score":0.0})", "application/json");
  });
  const RemoteScorer scorer(mock.url() + "/", fast());
  scorer.score_ideology("some text");
  const auto j = nlohmann::json::parse(seen);
  CHECK(j["text"] == "some text");
  CHECK(j["target"].is_null());
  CHECK(j["mode"] == "ideology");
}

TEST_CASE("out-of-range score is a protocol violation") {
  MockScorer mock(fixed(R"({"score":1.7})"));
  const RemoteScorer scorer(mock.url(), fast());
  CHECK_THROWS_AS(scorer.score_stance("q", "t"), ProtocolError);
  CHECK(mock.requests() == 1);
}

TEST_CASE("server errors are retried, client errors are not") {
  MockScorer failing(fixed(R"({"error":"boom"})", 503));
  const RemoteScorer retrying(failing.url(), fast());
  CHECK_THROWS_AS(retrying.score_stance("q", "t"), IoError);
  CHECK(failing.requests() == 3);

  MockScorer rejecting(fixed(R"({"error":"missing text"})", 400));
  const RemoteScorer once(rejecting.url(), fast());
  CHECK_THROWS_AS(once.score_stance("q", "t"), ProtocolError);
  CHECK(rejecting.requests() == 1);
}

TEST_CASE("unreachable endpoint fails after retries") {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  auto opts = fast();
  opts.timeout = std::chrono::milliseconds(200);
  const RemoteScorer scorer("http://127.0.0.1:" + std::to_string(port), opts);
  CHECK_THROWS_AS(scorer.score_ideology("t"), IoError);
  CHECK(!scorer.healthy());
}

TEST_CASE("bad endpoints are rejected up front") {
  CHECK_THROWS_AS(RemoteScorer("localhost:8080"), ValidationError);
  CHECK_THROWS_AS(RemoteScorer("https://example.org"), ValidationError);
}

TEST_CASE("concurrent requests round-trip") {
  MockScorer mock([](const httplib::Request& req, httplib::Response& res) {
    const auto j = nlohmann::json::parse(req.body);
    const double p = static_cast<double>(j["text"].get<std::string>().size() % 10) / 10.0;
    nlohmann::json out;
    out["score"] = 2.0 * p - 1.0;
    out["label"] = p >= 0.5 ? "pro" : "con";
    out["proba"] = {{"con", 1.0 - p}, {"pro", p}};
    res.set_content(out.dump(), "application/json");
  });
  auto opts = fast();
  opts.max_in_flight = 3;
  const RemoteScorer scorer(mock.url(), opts);
  std::vector<RemoteResult> results(100);
  parallel_for(results.size(), 8, [&](std::size_t i) {
    results[i] = scorer.score(std::string_view("q"), std::string(i, 'x'), RemoteMode::stance);
  });
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(results[i].score == doctest::Approx(2.0 * static_cast<double>(i % 10) / 10.0 - 1.0));
    CHECK(std::abs(results[i].proba["con"] + results[i].proba["pro"] - 1.0) < 1e-6);
  }
  CHECK(mock.requests() == 100);
}
