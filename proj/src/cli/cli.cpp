#include "scsl/cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "scsl/core/error.hpp"
#include "scsl/core/io.hpp"
#include "scsl/core/log.hpp"
#include "scsl/core/parallel.hpp"
#include "scsl/core/summation.hpp"
#include "scsl/core/text.hpp"
#include "scsl/corpus/store.hpp"
#include "scsl/dataset/dataset.hpp"
#include "scsl/metrics/ideology.hpp"
#include "scsl/scorer/remote.hpp"
#include "scsl/scorer/scorer.hpp"
#include "scsl/stats/stats.hpp"

namespace scsl::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Collects the resolved configuration, inputs and outputs of one run, and
// writes config.json plus manifest.json next to the outputs.
class RunContext {
 public:
  RunContext(std::string subcommand, fs::path out, std::uint64_t seed)
      : subcommand_(std::move(subcommand)), out_(std::move(out)), seed_(seed) {
    config_["subcommand"] = subcommand_;
    config_["seed"] = seed_;
  }

  ordered_json& config() { return config_; }

  void input(const std::string& path) {
    if (path.empty()) return;
    inputs_[path] = io::file_checksum(path);
  }

  void output(const std::string& name, std::string_view contents) {
    io::write_file_atomic(out_ / name, contents);
    outputs_.push_back(name);
  }

  // Records a file some other component already wrote into the output directory.
  void record(const std::string& name) { outputs_.push_back(name); }

  void finish() {
    const auto config_text = config_.dump(2) + "\n";
    io::write_file_atomic(out_ / "config.json", config_text);
    ordered_json manifest;
    manifest["tool"] = "scsl";
    manifest["subcommand"] = subcommand_;
    manifest["config_hash"] = "fnv1a64:" + io::hex64(io::fnv1a64(config_text));
    manifest["seed"] = seed_;
    manifest["inputs"] = ordered_json::object();
    for (const auto& [path, sum] : inputs_) manifest["inputs"][path] = sum;
    ordered_json outputs = ordered_json::object();
    for (const auto& name : outputs_) outputs[name] = io::file_checksum(out_ / name);
    manifest["outputs"] = outputs;
    manifest["versions"] = {{"scsl", kVersion}, {"model_format", scorer::kModelMagic}};
    io::write_file_atomic(out_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::string subcommand_;
  fs::path out_;
  std::uint64_t seed_;
  ordered_json config_;
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
};

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::size_t workers = default_workers();
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Master random seed")->required();
  sub->add_option("--out", c.out, "Output directory")->required();
  sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
}

// A scorer given as builtin:<model-file> or remote:<url>.
struct ScorerHandle {
  std::shared_ptr<const scorer::StanceScorer> scorer;
  std::shared_ptr<const scorer::LabelPredictor> predictor;
  std::shared_ptr<const scorer::Classifier> classifier;  // builtin only
  bool remote = false;
};

ScorerHandle open_scorer(const std::string& spec, scorer::Convention convention, RunContext& ctx) {
  ScorerHandle h;
  if (spec.rfind("builtin:", 0) == 0) {
    const auto path = spec.substr(8);
    ctx.input(path);
    h.classifier = std::make_shared<const scorer::Classifier>(scorer::load_classifier(path));
    auto s = std::make_shared<const scorer::BuiltinScorer>(h.classifier, convention);
    h.scorer = s;
    h.predictor = s;
  } else if (spec.rfind("remote:", 0) == 0) {
    auto s = std::make_shared<const scorer::RemoteScorer>(spec.substr(7));
    h.scorer = s;
    h.predictor = s;
    h.remote = true;
  } else {
    throw ValidationError("--scorer must be builtin:<model-file> or remote:<url>, got '" + spec + "'");
  }
  return h;
}

// Truncates (target [SEP] text) to the token limit before a remote call.
class TruncatingPredictor final : public scorer::LabelPredictor {
 public:
  TruncatingPredictor(std::shared_ptr<const scorer::LabelPredictor> inner, std::size_t limit)
      : inner_(std::move(inner)), limit_(limit) {}

  std::string predict_label(std::string_view target, std::string_view text) const override {
    const auto joined = dataset::truncate_for_scorer(target, text, limit_);
    const auto sep = joined.find("[SEP]");
    return inner_->predict_label(target, text::trim(std::string_view(joined).substr(sep + 5)));
  }

 private:
  std::shared_ptr<const scorer::LabelPredictor> inner_;
  std::size_t limit_;
};

scorer::Convention convention_from(const std::string& s) {
  const auto c = scorer::parse_convention(s);
  if (!c) throw ValidationError("--convention must be signed_predicted or expectation");
  return *c;
}

dataset::ClassSchema schema_from(int classes) {
  if (classes == 2) return dataset::ClassSchema::binary;
  if (classes == 3) return dataset::ClassSchema::three;
  throw ValidationError("--classes must be 2 or 3");
}

std::string report_errors_json(const corpus::IngestReport& r) {
  ordered_json j;
  j["ingested"] = r.ingested;
  j["errors"] = ordered_json::array();
  for (const auto& e : r.errors) j["errors"].push_back({{"line", e.line}, {"message", e.message}});
  return j.dump();
}

corpus::ColumnMapping parse_columns(const std::string& spec, const char* flag) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(std::string(text::trim(item)));
  if (parts.size() == 3) return {parts[0] == "-" ? "" : parts[0], parts[1], parts[2]};
  if (parts.size() == 2) return {"", parts[0], parts[1]};
  throw ValidationError(std::string(flag) + " expects entity,year,value or year,value");
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  Common common;
  std::string transcripts, opinions, cases, lexicon;
};

void cmd_ingest(const IngestArgs& a) {
  if (a.transcripts.empty() && a.opinions.empty() && a.cases.empty()) {
    throw ValidationError("ingest needs at least one of --transcripts, --opinions, --cases");
  }
  RunContext ctx("ingest", a.common.out, a.common.seed);
  ctx.config()["transcripts"] = a.transcripts;
  ctx.config()["opinions"] = a.opinions;
  ctx.config()["cases"] = a.cases;
  ctx.config()["lexicon"] = a.lexicon;
  corpus::CorpusStore store;
  ordered_json report;
  if (!a.transcripts.empty()) {
    ctx.input(a.transcripts);
    report["transcripts"] = ordered_json::parse(report_errors_json(store.ingest_transcripts(a.transcripts)));
  }
  if (!a.opinions.empty()) {
    ctx.input(a.opinions);
    report["opinions"] = ordered_json::parse(report_errors_json(store.ingest_opinions(a.opinions)));
  }
  if (!a.cases.empty()) {
    ctx.input(a.cases);
    report["cases"] = ordered_json::parse(report_errors_json(store.ingest_cases(a.cases)));
  }
  std::size_t per_curiam = 0;
  for (const auto& o : store.opinions()) per_curiam += o.flagged() ? 1 : 0;
  report["per_curiam_opinions"] = per_curiam;
  if (!a.lexicon.empty()) {
    ctx.input(a.lexicon);
    const auto lexicon = corpus::EmotionLexicon::load_tsv(a.lexicon);
    const corpus::StatementPool pool(store, lexicon);
    report["emotion_filtered_justice_statements"] = pool.size();
    report["justice_year_cells"] = pool.cells().size();
  }
  store.export_to(a.common.out);
  for (const char* name : {"transcripts.jsonl", "opinions.jsonl", "cases.jsonl"}) {
    ctx.record(name);
  }
  ctx.output("ingest_report.json", report.dump(2) + "\n");
  ctx.finish();
}

struct BuildArgs {
  Common common;
  std::string opinions, cases;
};

void cmd_build(const BuildArgs& a) {
  RunContext ctx("build-dataset", a.common.out, a.common.seed);
  ctx.config()["opinions"] = a.opinions;
  ctx.config()["cases"] = a.cases;
  ctx.input(a.opinions);
  ctx.input(a.cases);
  corpus::CorpusStore store;
  const auto op = store.ingest_opinions(a.opinions);
  const auto cs = store.ingest_cases(a.cases);
  auto build = dataset::build_dataset(store);
  ordered_json report = ordered_json::parse(build.report.to_json());
  report["ingest_errors"] = {{"opinions", op.errors.size()}, {"cases", cs.errors.size()}};
  ctx.output("dataset.jsonl", dataset::dump_dataset(build.examples));
  ctx.output("build_report.json", report.dump(2) + "\n");
  ctx.finish();
}

struct AugmentArgs {
  Common common;
  std::string dataset;
  double ratio = 0.5;
};

void cmd_augment(const AugmentArgs& a) {
  RunContext ctx("augment", a.common.out, a.common.seed);
  ctx.config()["dataset"] = a.dataset;
  ctx.config()["ratio"] = a.ratio;
  ctx.input(a.dataset);
  const auto examples = dataset::load_dataset(a.dataset);
  const auto augmented = dataset::augment_neutral(examples, a.ratio, a.common.seed);
  ctx.output("dataset.jsonl", dataset::dump_dataset(augmented));
  ctx.finish();
}

struct MaskArgs {
  Common common;
  std::string dataset, spans;
};

void cmd_mask(const MaskArgs& a) {
  RunContext ctx("mask", a.common.out, a.common.seed);
  ctx.config()["dataset"] = a.dataset;
  ctx.config()["spans"] = a.spans;
  ctx.input(a.dataset);
  const auto examples = dataset::load_dataset(a.dataset);
  dataset::GazetteerTagger tagger;
  std::map<std::size_t, std::vector<dataset::EntitySpan>> spans;
  if (!a.spans.empty()) {
    ctx.input(a.spans);
    spans = dataset::load_span_file(a.spans, examples);
  } else {
    for (std::size_t i = 0; i < examples.size(); ++i) spans[i] = tagger.tag(examples[i].text);
  }
  const auto masked = dataset::mask_examples(examples, tagger, &spans);
  std::string span_lines;
  for (const auto& [index, list] : spans) {
    for (const auto& s : list) span_lines += dataset::serialize_span(examples[index].case_id, index, s) + "\n";
  }
  ctx.output("dataset.jsonl", dataset::dump_dataset(masked));
  ctx.output("spans.jsonl", span_lines);
  ctx.finish();
}

struct SplitArgs {
  Common common;
  std::string dataset, masked;
  double fraction = 0.8;
  bool mask = false;
};

void cmd_split(const SplitArgs& a) {
  RunContext ctx("split", a.common.out, a.common.seed);
  ctx.config()["dataset"] = a.dataset;
  ctx.config()["masked"] = a.masked;
  ctx.config()["fraction"] = a.fraction;
  ctx.config()["mask"] = a.mask;
  ctx.input(a.dataset);
  const auto examples = dataset::load_dataset(a.dataset);
  auto parts = dataset::split(examples, a.fraction, a.common.seed);
  if (a.mask) {
    // Training examples are masked; test examples keep their entities.
    std::vector<dataset::StanceExample> masked_source;
    if (!a.masked.empty()) {
      ctx.input(a.masked);
      masked_source = dataset::load_dataset(a.masked);
      if (masked_source.size() != examples.size()) {
        throw ValidationError("--masked file must align with --dataset record by record");
      }
    } else {
      masked_source = dataset::mask_examples(examples, dataset::GazetteerTagger{});
    }
    for (std::size_t i = 0; i < parts.train.size(); ++i) {
      const auto& m = masked_source[parts.train_index[i]];
      if (m.case_id != parts.train[i].case_id) throw ValidationError("masked record does not match dataset record");
      parts.train[i] = m;
    }
  }
  ctx.output("train.jsonl", dataset::dump_dataset(parts.train));
  ctx.output("test.jsonl", dataset::dump_dataset(parts.test));
  ctx.finish();
}

struct TrainArgs {
  Common common;
  std::string data, model = "lr", task = "stance";
  int classes = 2;
  std::size_t epochs = 300, hidden = 256, max_vocab = scorer::kDefaultMaxVocab;
  double learning_rate = 0.5, l2 = 1e-4;
};

// Ideology training records: {"text": ..., "label": "liberal"|"conservative"}.
void load_ideology(const std::string& path, std::vector<std::string>& texts, std::vector<int>& labels) {
  std::size_t lineno = 0;
  for (const auto& line : io::read_lines(path)) {
    ++lineno;
    if (text::is_blank(line)) continue;
    const auto where = path + ":" + std::to_string(lineno) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw ValidationError(where + "not valid JSON");
    }
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string() || !j.contains("label") ||
        !j["label"].is_string()) {
      throw ValidationError(where + "ideology records need string fields text and label");
    }
    const auto label = j["label"].get<std::string>();
    if (label != "liberal" && label != "conservative") throw ValidationError(where + "label must be liberal or conservative");
    texts.push_back(j["text"].get<std::string>());
    labels.push_back(label == "conservative" ? 1 : 0);
  }
}

void cmd_train(const TrainArgs& a) {
  RunContext ctx("train", a.common.out, a.common.seed);
  auto& cfg = ctx.config();
  cfg["data"] = a.data;
  cfg["model"] = a.model;
  cfg["task"] = a.task;
  cfg["classes"] = a.classes;
  cfg["epochs"] = a.epochs;
  cfg["learning_rate"] = a.learning_rate;
  cfg["l2"] = a.l2;
  cfg["hidden"] = a.hidden;
  cfg["max_vocab"] = a.max_vocab;
  ctx.input(a.data);

  const auto task = scorer::parse_task(a.task);
  if (!task) throw ValidationError("--task must be stance or ideology");
  std::vector<std::string> targets;
  std::vector<std::string> texts;
  std::vector<int> labels;
  std::vector<std::string> names;
  std::size_t dropped = 0;
  if (*task == scorer::Task::stance) {
    const auto schema = schema_from(a.classes);
    names = dataset::model_label_names(schema);
    for (const auto& e : dataset::load_dataset(a.data)) {
      if (schema == dataset::ClassSchema::binary && e.label == dataset::Label::neutral) {
        ++dropped;
        continue;
      }
      targets.push_back(e.target);
      texts.push_back(e.text);
      labels.push_back(dataset::model_class_index(e.label, schema));
    }
  } else {
    names = {"liberal", "conservative"};
    load_ideology(a.data, texts, labels);
    targets.assign(texts.size(), "");
  }
  if (texts.empty()) throw ValidationError("no training examples in '" + a.data + "'");

  // The vocabulary sees targets and texts of the training split only.
  std::vector<std::string> docs = texts;
  for (const auto& t : targets) {
    if (!t.empty()) docs.push_back(t);
  }
  scorer::Classifier clf;
  clf.task = *task;
  clf.vocab = scorer::fit_tfidf(docs, a.max_vocab);
  std::vector<scorer::SparseVector> features;
  features.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) features.push_back(scorer::featurize(clf.vocab, targets[i], texts[i]));

  scorer::TrainOptions opts;
  opts.epochs = a.epochs;
  opts.learning_rate = a.learning_rate;
  opts.l2 = a.l2;
  opts.hidden_dim = a.hidden;
  opts.seed = a.common.seed;
  if (a.model == "lr") {
    clf.head = scorer::train_lr(features, labels, names, opts);
  } else if (a.model == "mlp") {
    clf.head = scorer::train_mlp(features, labels, names, opts);
  } else if (a.model == "majority") {
    clf.head = scorer::train_majority(labels, names, 2 * clf.vocab.size());
  } else {
    throw ValidationError("--model must be lr, mlp or majority");
  }

  std::size_t correct = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto p = std::visit([&](const auto& m) { return scorer::predict_proba(m, features[i]); }, clf.head);
    correct += static_cast<int>(scorer::argmax(p)) == labels[i] ? 1 : 0;
  }
  ordered_json report;
  report["examples"] = features.size();
  report["dropped_neutral"] = dropped;
  report["vocab_size"] = clf.vocab.size();
  report["labels"] = names;
  report["train_accuracy"] = static_cast<double>(correct) / static_cast<double>(features.size());
  ctx.output("model.scsl", scorer::serialize_classifier(clf));
  ctx.output("train_report.json", report.dump(2) + "\n");
  ctx.finish();
}

struct EvalArgs {
  Common common;
  std::string test, scorer, compare, convention = "signed_predicted";
  int classes = 2;
  std::size_t iterations = 10'000, token_limit = 512;
};

std::vector<dataset::Label> predict_with(const ScorerHandle& h, std::span<const dataset::StanceExample> test,
                                         std::size_t token_limit, std::size_t workers) {
  if (h.remote) {
    TruncatingPredictor wrapped(h.predictor, token_limit);
    return dataset::predict_labels(wrapped, test, workers);
  }
  return dataset::predict_labels(*h.predictor, test, workers);
}

void cmd_eval(const EvalArgs& a) {
  RunContext ctx("eval", a.common.out, a.common.seed);
  auto& cfg = ctx.config();
  cfg["test"] = a.test;
  cfg["scorer"] = a.scorer;
  cfg["compare"] = a.compare;
  cfg["classes"] = a.classes;
  cfg["convention"] = a.convention;
  cfg["iterations"] = a.iterations;
  cfg["token_limit"] = a.token_limit;
  ctx.input(a.test);
  const auto schema = schema_from(a.classes);
  const auto convention = convention_from(a.convention);

  std::vector<dataset::StanceExample> test;
  std::size_t dropped = 0;
  for (auto& e : dataset::load_dataset(a.test)) {
    if (schema == dataset::ClassSchema::binary && e.label == dataset::Label::neutral) {
      ++dropped;
      continue;
    }
    test.push_back(std::move(e));
  }
  if (test.empty()) throw ValidationError("test set is empty");
  std::vector<dataset::Label> gold;
  for (const auto& e : test) gold.push_back(e.label);

  const auto primary = open_scorer(a.scorer, convention, ctx);
  if (primary.classifier && primary.classifier->labels().size() != dataset::schema_labels(schema).size()) {
    throw ValidationError("model class count does not match --classes");
  }
  const auto preds = predict_with(primary, test, a.token_limit, a.common.workers);
  const auto result = dataset::evaluate(gold, preds, schema);

  ordered_json report = ordered_json::parse(result.to_json());
  report["examples"] = test.size();
  report["dropped_neutral"] = dropped;
  std::string pred_lines;
  for (std::size_t i = 0; i < test.size(); ++i) {
    ordered_json line;
    line["index"] = i;
    line["case_id"] = test[i].case_id;
    line["gold"] = dataset::to_string(gold[i]);
    line["predicted"] = dataset::to_string(preds[i]);
    pred_lines += line.dump() + "\n";
  }

  if (!a.compare.empty()) {
    const auto other = open_scorer(a.compare, convention, ctx);
    const auto other_preds = predict_with(other, test, a.token_limit, a.common.workers);
    const auto other_result = dataset::evaluate(gold, other_preds, schema);
    std::vector<int> ga, pa, pb;
    for (std::size_t i = 0; i < test.size(); ++i) {
      ga.push_back(static_cast<int>(gold[i]));
      pa.push_back(static_cast<int>(preds[i]));
      pb.push_back(static_cast<int>(other_preds[i]));
    }
    const stats::PairedMetric macro_f1 = [schema](std::span<const int> p, std::span<const int> g) {
      std::vector<dataset::Label> pl, gl;
      for (int v : p) pl.push_back(static_cast<dataset::Label>(v));
      for (int v : g) gl.push_back(static_cast<dataset::Label>(v));
      return dataset::evaluate(gl, pl, schema).macro_f1;
    };
    stats::RandomizationOptions ro{a.iterations, a.common.seed, a.common.workers};
    report["comparison"] = {{"scorer", a.compare},
                            {"macro_f1", other_result.macro_f1},
                            {"accuracy", other_result.accuracy},
                            {"metric", "macro_f1"},
                            {"iterations", a.iterations},
                            {"p_value", stats::approx_randomization_test(macro_f1, pa, pb, ga, ro)}};
  }
  ctx.output("eval_report.json", report.dump(2) + "\n");
  ctx.output("predictions.jsonl", pred_lines);
  ctx.finish();
}

struct MetricsArgs {
  Common common;
  std::string transcripts, lexicon, targets, scorer, hps_scorer, opinions, cases, convention = "signed_predicted",
      which = "both";
  std::size_t n = 1000, min_statements = 25;
  bool liberal_positive = false;
};

void cmd_metrics(const MetricsArgs& a) {
  RunContext ctx("metrics", a.common.out, a.common.seed);
  auto& cfg = ctx.config();
  cfg["transcripts"] = a.transcripts;
  cfg["lexicon"] = a.lexicon;
  cfg["targets"] = a.targets;
  cfg["scorer"] = a.scorer;
  cfg["hps_scorer"] = a.hps_scorer;
  cfg["opinions"] = a.opinions;
  cfg["cases"] = a.cases;
  cfg["convention"] = a.convention;
  cfg["which"] = a.which;
  cfg["n"] = a.n;
  cfg["min_statements"] = a.min_statements;
  cfg["higher_is_conservative"] = !a.liberal_positive;

  const auto which = metrics::parse_which(a.which);
  if (!which) throw ValidationError("--which must be iss, hps or both");
  if (a.n == 0) throw ValidationError("--n must be >= 1");
  const auto convention = convention_from(a.convention);
  metrics::IssConfig iss_cfg;
  iss_cfg.convention = convention;
  iss_cfg.higher_is_conservative = !a.liberal_positive;
  if (*which != metrics::Which::hps) {
    if (a.targets.empty()) throw ValidationError("--targets is required when computing ISS");
    ctx.input(a.targets);
    iss_cfg.targets = corpus::TargetSet::load(a.targets);
    if (iss_cfg.targets.liberal.empty() || iss_cfg.targets.conservative.empty()) {
      throw ValidationError("target lists must be non-empty");
    }
  }
  const auto stance = open_scorer(a.scorer, convention, ctx);
  const auto ideology = a.hps_scorer.empty() ? stance : open_scorer(a.hps_scorer, convention, ctx);
  const metrics::CompositeScorer scorer(*stance.scorer, *ideology.scorer);

  ctx.input(a.transcripts);
  ctx.input(a.lexicon);
  corpus::CorpusStore store;
  const auto report = store.ingest_transcripts(a.transcripts);
  if (!report.errors.empty()) log::warn(report.errors.size(), " malformed transcript lines skipped");
  const auto lexicon = corpus::EmotionLexicon::load_tsv(a.lexicon);
  const corpus::StatementPool pool(store, lexicon);

  metrics::YearScoreOptions opts;
  opts.n = a.n;
  opts.seed = a.common.seed;
  opts.which = *which;
  opts.min_statements = a.min_statements;
  opts.workers = a.common.workers;
  std::string lines;
  for (const auto& s : metrics::all_justice_year_scores(pool, opts, iss_cfg, scorer)) lines += metrics::serialize(s) + "\n";
  ctx.output("justice_year_scores.jsonl", lines);

  if (!a.opinions.empty()) {
    ctx.input(a.opinions);
    corpus::CorpusStore ops;
    ops.ingest_opinions(a.opinions);
    if (!a.cases.empty()) {
      ctx.input(a.cases);
      ops.ingest_cases(a.cases);
    }
    const auto& all = ops.opinions();
    std::vector<double> values(all.size());
    parallel_for(all.size(), a.common.workers, [&](std::size_t i) {
      values[i] = metrics::hps(all[i].text, scorer, iss_cfg.higher_is_conservative);
    });
    std::map<std::string, std::pair<int, std::vector<double>>> per_case;
    for (std::size_t i = 0; i < all.size(); ++i) {
      auto& slot = per_case[all[i].case_id];
      slot.first = all[i].year;
      slot.second.push_back(values[i]);
    }
    std::string case_lines;
    for (const auto& [case_id, entry] : per_case) {
      ordered_json j;
      j["case_id"] = case_id;
      j["year"] = entry.first;
      j["hps"] = compensated_mean(entry.second);
      j["n_opinions"] = entry.second.size();
      const auto* meta = ops.find_case(case_id);
      j["salience"] = meta != nullptr && meta->salience ? ordered_json(*meta->salience) : ordered_json(nullptr);
      case_lines += j.dump() + "\n";
    }
    ctx.output("opinion_scores.jsonl", case_lines);
  }
  ctx.finish();
}

struct AnalyzeArgs {
  Common common;
  std::string scores, mq, mq_columns = "justice,year,mq", mood, mood_columns = "year,mood", salience,
      salience_columns = "case_id,year,salience", opinion_scores, method = "permutation", stat = "mean",
      metric = "hps";
  double alpha = 0.05;
  std::size_t min_years = 5, permutations = 10'000;
};

std::string correlation_row(const std::string& analysis, const std::string& group, const std::string& year,
                            const stats::CorrelationResult& r) {
  return analysis + "\t" + group + "\t" + year + "\t" + fmt_double(r.r) + "\t" + fmt_double(r.p_value) + "\t" +
         std::to_string(r.n) + "\t" + std::string(stats::to_string(r.method)) + "\t" + std::to_string(r.seed) + "\n";
}

void cmd_analyze(const AnalyzeArgs& a) {
  RunContext ctx("analyze", a.common.out, a.common.seed);
  auto& cfg = ctx.config();
  cfg["scores"] = a.scores;
  cfg["mq"] = a.mq;
  cfg["mq_columns"] = a.mq_columns;
  cfg["mood"] = a.mood;
  cfg["mood_columns"] = a.mood_columns;
  cfg["salience"] = a.salience;
  cfg["salience_columns"] = a.salience_columns;
  cfg["opinion_scores"] = a.opinion_scores;
  cfg["method"] = a.method;
  cfg["stat"] = a.stat;
  cfg["metric"] = a.metric;
  cfg["alpha"] = a.alpha;
  cfg["min_years"] = a.min_years;
  cfg["permutations"] = a.permutations;

  const auto method = stats::parse_pvalue_method(a.method);
  if (!method) throw ValidationError("--method must be permutation or t_approx");
  const auto stat = metrics::parse_aggregate(a.stat);
  if (!stat) throw ValidationError("--stat must be mean or median");
  const auto metric = metrics::parse_metric(a.metric);
  if (!metric) throw ValidationError("--metric must be hps or iss");
  stats::CorrelationOptions copts{*method, a.permutations, a.common.seed, a.common.workers};

  ctx.input(a.scores);
  const auto scores = metrics::load_justice_year_scores(a.scores);
  std::string table = "analysis\tgroup\tyear\tr\tp_value\tn\tmethod\tseed\n";

  const auto agreement = stats::iss_hps_agreement(scores, *stat, copts);
  std::string plot_agreement = "justice_id\tiss\thps\n";
  for (std::size_t i = 0; i < agreement.justices.size(); ++i) {
    plot_agreement += agreement.justices[i] + "\t" + fmt_double(agreement.iss[i]) + "\t" + fmt_double(agreement.hps[i]) + "\n";
  }
  if (agreement.correlation) table += correlation_row("iss_vs_hps", "all", "-", *agreement.correlation);
  ctx.output("plot_iss_hps.tsv", plot_agreement);

  if (!a.mq.empty() && !a.mood.empty()) {
    ctx.input(a.mq);
    ctx.input(a.mood);
    const auto mq = corpus::ingest_metric_table(a.mq, "martin_quinn", parse_columns(a.mq_columns, "--mq-columns"));
    const auto mood = corpus::ingest_metric_table(a.mood, "policy_mood", parse_columns(a.mood_columns, "--mood-columns"));
    for (const auto* t : {&mq, &mood}) {
      for (const auto& e : t->rejected) log::warn(t->series.name(), " row ", e.line, ": ", e.message);
    }
    const auto partition = stats::responsiveness_partition(mq.series, mood.series, a.alpha, a.min_years, copts);
    std::string resp = "justice_id\tstatus\tr\tp_value\tn\n";
    for (const auto& [j, r] : partition.per_justice) {
      resp += j + "\t" + (partition.responsive.contains(j) ? "responsive" : "nonresponsive") + "\t" + fmt_double(r.r) +
              "\t" + fmt_double(r.p_value) + "\t" + std::to_string(r.n) + "\n";
      table += correlation_row("mq_vs_mood", j, "-", r);
    }
    for (const auto& [j, reason] : partition.excluded) resp += j + "\texcluded\t\t\t" + reason + "\n";
    ctx.output("responsiveness.tsv", resp);

    const auto grouped = stats::grouped_ideology_correlation(scores, *metric, mq.series, partition, *stat, copts);
    std::string plot = "justice_id\tgroup\tlanguage\tmq\n";
    for (const auto& [name, g] : {std::pair{"responsive", &grouped.responsive}, std::pair{"nonresponsive", &grouped.nonresponsive}}) {
      for (const auto& p : g->points) {
        plot += p.justice_id + "\t" + name + "\t" + fmt_double(p.language) + "\t" + fmt_double(p.mq) + "\n";
      }
      if (g->correlation) {
        table += correlation_row(a.metric + "_vs_mq", name, "-", *g->correlation);
      } else {
        log::warn(name, " group: ", g->flag);
      }
    }
    ctx.output("plot_ideology_mq.tsv", plot);
  }

  if (!a.opinion_scores.empty()) {
    ctx.input(a.opinion_scores);
    std::vector<stats::CaseScore> case_scores;
    corpus::MetricSeries embedded("salience");
    for (const auto& line : io::read_lines(a.opinion_scores)) {
      if (text::is_blank(line)) continue;
      const auto j = nlohmann::json::parse(line);
      case_scores.push_back({j.at("case_id").get<std::string>(), j.at("hps").get<double>()});
      if (j.contains("salience") && !j["salience"].is_null()) {
        embedded.insert(j["case_id"].get<std::string>(), j.at("year").get<int>(), j["salience"].get<double>());
      }
    }
    corpus::MetricSeries salience = embedded;
    if (!a.salience.empty()) {
      ctx.input(a.salience);
      salience = corpus::ingest_metric_table(a.salience, "salience", parse_columns(a.salience_columns, "--salience-columns")).series;
    }
    const auto analysis = stats::salience_politicality(case_scores, salience, true, copts);
    std::string plot = "year\tr\tp_value\tn\n";
    for (const auto& yc : analysis.correlations) {
      plot += std::to_string(*yc.year) + "\t" + fmt_double(yc.result.r) + "\t" + fmt_double(yc.result.p_value) + "\t" +
              std::to_string(yc.result.n) + "\n";
      table += correlation_row("abs_hps_vs_salience", "cases", std::to_string(*yc.year), yc.result);
    }
    ctx.output("plot_salience.tsv", plot);
  }

  ctx.output("analysis.tsv", table);
  ctx.finish();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Judicial-language stance and ideology toolkit", "scsl"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML/INI config file; flags override it");
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Validate and store transcripts, opinions and case metadata");
  add_common(s_ingest, ingest.common);
  s_ingest->add_option("--transcripts", ingest.transcripts)->check(CLI::ExistingFile);
  s_ingest->add_option("--opinions", ingest.opinions)->check(CLI::ExistingFile);
  s_ingest->add_option("--cases", ingest.cases)->check(CLI::ExistingFile);
  s_ingest->add_option("--lexicon", ingest.lexicon)->check(CLI::ExistingFile);

  BuildArgs build;
  auto* s_build = app.add_subcommand("build-dataset", "Build labeled stance examples from opinions and cases");
  add_common(s_build, build.common);
  s_build->add_option("--opinions", build.opinions)->required()->check(CLI::ExistingFile);
  s_build->add_option("--cases", build.cases)->required()->check(CLI::ExistingFile);

  AugmentArgs augment;
  auto* s_augment = app.add_subcommand("augment", "Add neutral examples by pairing opinions with unrelated questions");
  add_common(s_augment, augment.common);
  s_augment->add_option("--dataset", augment.dataset)->required()->check(CLI::ExistingFile);
  s_augment->add_option("--ratio", augment.ratio)->check(CLI::NonNegativeNumber);

  MaskArgs mask;
  auto* s_mask = app.add_subcommand("mask", "Replace named entities (except laws) with their type");
  add_common(s_mask, mask.common);
  s_mask->add_option("--dataset", mask.dataset)->required()->check(CLI::ExistingFile);
  s_mask->add_option("--spans", mask.spans, "Entity span file; default is the built-in tagger")->check(CLI::ExistingFile);

  SplitArgs split;
  auto* s_split = app.add_subcommand("split", "Seeded train/test split");
  add_common(s_split, split.common);
  s_split->add_option("--dataset", split.dataset)->required()->check(CLI::ExistingFile);
  s_split->add_option("--masked", split.masked, "Masked copy of --dataset used for training rows")->check(CLI::ExistingFile);
  s_split->add_option("--fraction", split.fraction);
  s_split->add_flag("--mask,!--no-mask", split.mask, "Mask entities in the training split");

  TrainArgs train;
  auto* s_train = app.add_subcommand("train", "Fit tf-idf features and a classifier head");
  add_common(s_train, train.common);
  s_train->add_option("--data", train.data)->required()->check(CLI::ExistingFile);
  s_train->add_option("--model", train.model, "lr | mlp | majority");
  s_train->add_option("--task", train.task, "stance | ideology");
  s_train->add_option("--classes", train.classes);
  s_train->add_option("--epochs", train.epochs);
  s_train->add_option("--learning-rate", train.learning_rate);
  s_train->add_option("--l2", train.l2);
  s_train->add_option("--hidden", train.hidden);
  s_train->add_option("--max-vocab", train.max_vocab);

  EvalArgs eval;
  auto* s_eval = app.add_subcommand("eval", "Macro-F1 / accuracy of a scorer on a test split");
  add_common(s_eval, eval.common);
  s_eval->add_option("--test", eval.test)->required()->check(CLI::ExistingFile);
  s_eval->add_option("--scorer", eval.scorer, "builtin:<model-file> | remote:<url>")->required();
  s_eval->add_option("--compare", eval.compare, "Second scorer for a randomization test");
  s_eval->add_option("--classes", eval.classes);
  s_eval->add_option("--convention", eval.convention);
  s_eval->add_option("--iterations", eval.iterations);
  s_eval->add_option("--token-limit", eval.token_limit);

  MetricsArgs met;
  auto* s_metrics = app.add_subcommand("metrics", "Per-justice per-year ISS and HPS");
  add_common(s_metrics, met.common);
  s_metrics->add_option("--transcripts", met.transcripts)->required()->check(CLI::ExistingFile);
  s_metrics->add_option("--lexicon", met.lexicon)->required()->check(CLI::ExistingFile);
  s_metrics->add_option("--targets", met.targets)->check(CLI::ExistingFile);
  s_metrics->add_option("--scorer", met.scorer, "builtin:<model-file> | remote:<url>")->required();
  s_metrics->add_option("--hps-scorer", met.hps_scorer, "Scorer for HPS; defaults to --scorer");
  s_metrics->add_option("--opinions", met.opinions, "Also score written opinions per case")->check(CLI::ExistingFile);
  s_metrics->add_option("--cases", met.cases, "Case metadata carrying salience")->check(CLI::ExistingFile);
  s_metrics->add_option("--convention", met.convention);
  s_metrics->add_option("--which", met.which, "iss | hps | both");
  s_metrics->add_option("--n", met.n, "Statements sampled per justice-year");
  s_metrics->add_option("--min-statements", met.min_statements);
  s_metrics->add_flag("--liberal-positive", met.liberal_positive, "Orient scores so liberal is positive");

  AnalyzeArgs an;
  auto* s_analyze = app.add_subcommand("analyze", "Correlation analyses against baseline metrics");
  add_common(s_analyze, an.common);
  s_analyze->add_option("--scores", an.scores)->required()->check(CLI::ExistingFile);
  s_analyze->add_option("--mq", an.mq)->check(CLI::ExistingFile);
  s_analyze->add_option("--mq-columns", an.mq_columns, "entity,year,value");
  s_analyze->add_option("--mood", an.mood)->check(CLI::ExistingFile);
  s_analyze->add_option("--mood-columns", an.mood_columns, "year,value");
  s_analyze->add_option("--salience", an.salience)->check(CLI::ExistingFile);
  s_analyze->add_option("--salience-columns", an.salience_columns, "case,year,value");
  s_analyze->add_option("--opinion-scores", an.opinion_scores)->check(CLI::ExistingFile);
  s_analyze->add_option("--method", an.method, "permutation | t_approx");
  s_analyze->add_option("--stat", an.stat, "mean | median");
  s_analyze->add_option("--metric", an.metric, "hps | iss");
  s_analyze->add_option("--alpha", an.alpha);
  s_analyze->add_option("--min-years", an.min_years);
  s_analyze->add_option("--permutations", an.permutations);

  std::vector<std::string> reversed(args.empty() ? args.end() : args.begin() + 1, args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (s_ingest->parsed()) cmd_ingest(ingest);
    else if (s_build->parsed()) cmd_build(build);
    else if (s_augment->parsed()) cmd_augment(augment);
    else if (s_mask->parsed()) cmd_mask(mask);
    else if (s_split->parsed()) cmd_split(split);
    else if (s_train->parsed()) cmd_train(train);
    else if (s_eval->parsed()) cmd_eval(eval);
    else if (s_metrics->parsed()) cmd_metrics(met);
    else if (s_analyze->parsed()) cmd_analyze(an);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace scsl::cli
