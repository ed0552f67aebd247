#include "cli_runner.hpp"
#include "doctest.h"
#include "json.hpp"
#include "mock_scorer.hpp"
#include "scsl/core/io.hpp"
#include "scsl/core/text.hpp"
#include "scsl/dataset/dataset.hpp"
#include "scsl/scorer/scorer.hpp"
#include "temp_dir.hpp"

using namespace scsl;
using testing::fixture;
using testing::run_cli;

namespace {

nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(io::read_file(p)); }

// build-dataset -> split -> majority model, returning the split directory.
void prepare(const testing::TempDir& dir) {
  REQUIRE(run_cli({"build-dataset", "--seed", "1", "--out", (dir / "build").string(), "--opinions",
                   fixture("opinions.jsonl"), "--cases", fixture("cases.jsonl")})
              .code == 0);
  REQUIRE(run_cli({"split", "--seed", "1", "--out", (dir / "split").string(), "--dataset",
                   (dir / "build/dataset.jsonl").string()})
              .code == 0);
  REQUIRE(run_cli({"train", "--seed", "1", "--out", (dir / "maj").string(), "--model", "majority", "--data",
                   (dir / "split/train.jsonl").string()})
              .code == 0);
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  testing::TempDir dir;
  auto r = run_cli({"augment", "--out", dir.path().string(), "--dataset", fixture("cases.jsonl")});
  CHECK(r.code == 1);
  CHECK(r.err.find("--seed") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run_cli({"augment", "--seed", "1", "--out", dir.path().string(), "--dataset", fixture("cases.jsonl"),
                 "--frobnicate"})
            .code == 1);
  CHECK(run_cli({"nonsense"}).code == 1);
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"augment", "--seed", "1", "--out", dir.path().string(), "--dataset", "/no/such/file"}).code == 1);
}

TEST_CASE("malformed inputs exit 1") {
  testing::TempDir dir;
  io::write_file_atomic(dir / "bad.jsonl", "{\"case_id\": 3}\n");
  CHECK(run_cli({"augment", "--seed", "1", "--out", (dir / "o").string(), "--dataset", (dir / "bad.jsonl").string()})
            .code == 1);
  CHECK(run_cli({"train", "--seed", "1", "--out", (dir / "o").string(), "--data", fixture("ideology_train.jsonl"),
                 "--task", "ideology", "--model", "svm"})
            .code == 1);
}

TEST_CASE("eval with a majority predictor reports evaluate's macro-F1") {
  testing::TempDir dir;
  prepare(dir);
  const auto model = "builtin:" + (dir / "maj/model.scsl").string();
  REQUIRE(run_cli({"eval", "--seed", "1", "--out", (dir / "eval").string(), "--test",
                   (dir / "split/test.jsonl").string(), "--scorer", model})
              .code == 0);
  const auto report = read_json(dir / "eval/eval_report.json");

  const auto test = dataset::load_dataset(dir / "split/test.jsonl");
  const auto majority = read_json(dir / "maj/train_report.json");
  std::vector<dataset::Label> gold, pred;
  const auto clf = scorer::load_classifier(dir / "maj/model.scsl");
  const auto label = *dataset::parse_label(clf.labels()[std::get<scorer::MajorityModel>(clf.head).predicted]);
  for (const auto& e : test) {
    gold.push_back(e.label);
    pred.push_back(label);
  }
  const auto expected = dataset::evaluate(gold, pred, dataset::ClassSchema::binary);
  CHECK(report["macro_f1"].get<double>() == expected.macro_f1);
  CHECK(report["accuracy"].get<double>() == expected.accuracy);
  CHECK(majority["train_accuracy"].get<double>() > 0.0);
}

TEST_CASE("every run writes config and manifest") {
  testing::TempDir dir;
  prepare(dir);
  for (const char* sub : {"build", "split", "maj"}) {
    const auto manifest = read_json(dir / sub / "manifest.json");
    CHECK(manifest["seed"] == 1);
    CHECK(manifest.contains("config_hash"));
    CHECK(!manifest["inputs"].empty());
    CHECK(!manifest["outputs"].empty());
    CHECK(manifest["versions"]["scsl"] == cli::kVersion);
    for (const auto& [name, sum] : manifest["outputs"].items()) CHECK(io::file_checksum(dir / sub / name) == sum);
    const auto config = io::read_file(dir / sub / "config.json");
    CHECK(manifest["config_hash"] == "fnv1a64:" + io::hex64(io::fnv1a64(config)));
  }
}

TEST_CASE("rerun with identical config is byte-identical and inputs are untouched") {
  testing::TempDir dir;
  const auto before = io::file_checksum(fixture("opinions.jsonl"));
  prepare(dir);
  const auto first = io::read_file(dir / "split/train.jsonl");
  const auto manifest = io::read_file(dir / "split/manifest.json");
  prepare(dir);
  CHECK(io::read_file(dir / "split/train.jsonl") == first);
  CHECK(io::read_file(dir / "split/manifest.json") == manifest);
  CHECK(io::file_checksum(fixture("opinions.jsonl")) == before);
}

TEST_CASE("config file with flag override") {
  testing::TempDir dir;
  prepare(dir);
  io::write_file_atomic(dir / "run.toml", "[augment]\nseed = 9\nratio = 1.0\n");
  REQUIRE(run_cli({"--config", (dir / "run.toml").string(), "augment", "--out", (dir / "a").string(), "--dataset",
                   (dir / "build/dataset.jsonl").string(), "--ratio", "0.2"})
              .code == 0);
  const auto config = read_json(dir / "a/config.json");
  CHECK(config["seed"] == 9);
  CHECK(config["ratio"] == 0.2);
}

TEST_CASE("split masks the training side only") {
  testing::TempDir dir;
  prepare(dir);
  REQUIRE(run_cli({"split", "--seed", "1", "--out", (dir / "m").string(), "--dataset",
                   (dir / "build/dataset.jsonl").string(), "--mask"})
              .code == 0);
  for (const auto& e : dataset::load_dataset(dir / "m/train.jsonl")) CHECK(e.masked);
  for (const auto& e : dataset::load_dataset(dir / "m/test.jsonl")) CHECK(!e.masked);
  CHECK(io::read_file(dir / "m/test.jsonl") == io::read_file(dir / "split/test.jsonl"));
}

TEST_CASE("remote scorer failures exit 2") {
  testing::TempDir dir;
  prepare(dir);
  testing::MockScorer mock([](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
    res.set_content("{}", "application/json");
  });
  const auto r = run_cli({"eval", "--seed", "1", "--out", (dir / "e").string(), "--test",
                          (dir / "split/test.jsonl").string(), "--scorer", "remote:" + mock.url(), "--workers", "1"});
  CHECK(r.code == 2);
  CHECK(!std::filesystem::exists(dir / "e/eval_report.json"));
}

TEST_CASE("remote eval truncates inputs") {
  testing::TempDir dir;
  prepare(dir);
  std::atomic<std::size_t> longest{0};
  testing::MockScorer mock([&longest](const httplib::Request& req, httplib::Response& res) {
    const auto j = nlohmann::json::parse(req.body);
    const auto tokens = text::split_whitespace(j["target"].get<std::string>()).size() +
                        text::split_whitespace(j["text"].get<std::string>()).size() + 1;
    std::size_t seen = longest.load();
    while (tokens > seen && !longest.compare_exchange_weak(seen, tokens)) {
    }
    res.set_content(R"({"score":0.5,"label":"pro","proba":{"con":0.25,"pro":0.75}})", "application/json");
  });
  REQUIRE(run_cli({"eval", "--seed", "1", "--out", (dir / "e").string(), "--test",
                   (dir / "split/test.jsonl").string(), "--scorer", "remote:" + mock.url(), "--token-limit", "30"})
              .code == 0);
  CHECK(longest.load() <= 30);
  CHECK(longest.load() > 0);
}
