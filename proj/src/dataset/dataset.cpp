#include "scsl/dataset/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "scsl/core/error.hpp"
#include "scsl/core/io.hpp"
#include "scsl/core/log.hpp"
#include "scsl/core/random.hpp"
#include "scsl/core/text.hpp"

namespace scsl::dataset {

using corpus::OpinionType;
using corpus::WinningParty;

std::string_view to_string(Label label) {
  switch (label) {
    case Label::pro: return "pro";
    case Label::con: return "con";
    case Label::neutral: return "neutral";
  }
  return "neutral";
}

std::optional<Label> parse_label(std::string_view s) {
  if (s == "pro") return Label::pro;
  if (s == "con") return Label::con;
  if (s == "neutral") return Label::neutral;
  return std::nullopt;
}

std::optional<Label> infer_stance_label(WinningParty winner, OpinionType type) {
  if (winner == WinningParty::unclear || type == OpinionType::per_curiam) return std::nullopt;
  const bool petitioner_won = winner == WinningParty::petitioner;
  const bool joins_disposition = type != OpinionType::dissenting;
  return petitioner_won == joins_disposition ? Label::pro : Label::con;
}

std::string BuildReport::to_json() const {
  nlohmann::ordered_json j;
  j["opinions"] = opinions;
  j["examples"] = examples;
  j["by_label"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : by_label) j["by_label"][k] = v;
  j["skipped"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : skipped) j["skipped"][k] = v;
  return j.dump(2) + "\n";
}

DatasetBuild build_dataset(const corpus::CorpusStore& store) {
  DatasetBuild out;
  auto& report = out.report;
  for (const auto& label : {Label::pro, Label::con}) report.by_label[std::string(to_string(label))] = 0;
  for (const auto& opinion : store.opinions()) {
    ++report.opinions;
    const auto* meta = store.find_case(opinion.case_id);
    const char* skip = nullptr;
    std::optional<Label> label;
    if (meta == nullptr) {
      skip = "missing_case_meta";
    } else if (!meta->legal_question) {
      skip = "no_legal_question";
    } else if (opinion.opinion_type == OpinionType::per_curiam) {
      skip = "per_curiam";
    } else if (meta->winning_party == WinningParty::unclear) {
      skip = "unclear_winner";
    } else {
      label = infer_stance_label(meta->winning_party, opinion.opinion_type);
    }
    if (skip != nullptr) {
      ++report.skipped[skip];
      log::debug("skipping opinion of case ", opinion.case_id, ": ", skip);
      continue;
    }
    out.examples.push_back({opinion.case_id, *meta->legal_question, opinion.text, *label, opinion.opinion_type, false});
    ++report.by_label[std::string(to_string(*label))];
  }
  report.examples = out.examples.size();
  if (report.skipped.contains("no_legal_question")) {
    log::info(report.skipped["no_legal_question"], " opinions have no matching legal question");
  }
  return out;
}

std::vector<StanceExample> augment_neutral(std::span<const StanceExample> examples, double ratio,
                                           std::uint64_t seed) {
  if (!(ratio >= 0.0) || !std::isfinite(ratio)) throw ValidationError("neutral ratio must be finite and >= 0");
  std::vector<StanceExample> out(examples.begin(), examples.end());
  // The epsilon keeps decimal ratios such as 0.29 * 100 from flooring to 28.
  const auto count = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(examples.size()) + 1e-9));
  if (count == 0) return out;

  std::vector<std::string> case_ids;
  std::vector<const std::string*> questions;
  std::map<std::string, std::size_t> case_pos;
  for (const auto& e : examples) {
    if (case_pos.emplace(e.case_id, case_ids.size()).second) {
      case_ids.push_back(e.case_id);
      questions.push_back(&e.target);
    }
  }
  if (case_ids.size() < 2) throw ValidationError("neutral augmentation needs at least two distinct cases");

  Rng rng(seed);
  out.reserve(examples.size() + count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto& source = examples[uniform_index(rng, examples.size())];
    const std::size_t own = case_pos.at(source.case_id);
    auto other = static_cast<std::size_t>(uniform_index(rng, case_ids.size() - 1));
    if (other >= own) ++other;
    out.push_back({source.case_id, *questions[other], source.text, Label::neutral, source.opinion_type, source.masked});
  }
  return out;
}

std::string ner_mask(std::string_view text, std::span<const EntitySpan> spans) {
  if (spans.empty()) return std::string(text);
  const auto offsets = text::codepoint_byte_offsets(text);
  const std::size_t length = offsets.size() - 1;

  struct ByteSpan {
    std::size_t begin;
    std::size_t end;
    const std::string* type;
  };
  std::vector<ByteSpan> bytes;
  bytes.reserve(spans.size());
  for (const auto& s : spans) {
    if (s.start >= s.end || s.end > length) {
      throw ValidationError("entity span [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                            ") invalid for text of length " + std::to_string(length));
    }
    if (s.entity_type.empty()) throw ValidationError("entity span without a type");
    bytes.push_back({offsets[s.start], offsets[s.end], &s.entity_type});
  }
  std::sort(bytes.begin(), bytes.end(), [](const auto& a, const auto& b) { return a.begin < b.begin; });
  for (std::size_t i = 1; i < bytes.size(); ++i) {
    if (bytes[i].begin < bytes[i - 1].end) throw ValidationError("entity spans overlap");
  }

  std::string out;
  out.reserve(text.size());
  std::size_t cursor = 0;
  std::size_t first = 0;  // first span that may still overlap a later token
  for (const auto& tok : text::whitespace_tokens(text)) {
    while (first < bytes.size() && bytes[first].end <= tok.begin) ++first;
    const std::string* mask = nullptr;
    bool law = false;
    for (std::size_t i = first; i < bytes.size() && bytes[i].begin < tok.end; ++i) {
      if (*bytes[i].type == kLawEntity) {
        law = true;
      } else if (mask == nullptr) {
        mask = bytes[i].type;
      }
    }
    out.append(text.substr(cursor, tok.begin - cursor));
    if (mask != nullptr && !law) {
      out += '[';
      out += *mask;
      out += ']';
    } else {
      out.append(text.substr(tok.begin, tok.end - tok.begin));
    }
    cursor = tok.end;
  }
  out.append(text.substr(cursor));
  return out;
}

std::map<std::size_t, std::vector<EntitySpan>> load_span_file(const std::filesystem::path& path,
                                                              std::span<const StanceExample> dataset) {
  std::map<std::size_t, std::vector<EntitySpan>> out;
  std::size_t lineno = 0;
  for (const auto& line : io::read_lines(path)) {
    ++lineno;
    if (text::is_blank(line)) continue;
    const auto where = path.string() + ":" + std::to_string(lineno) + ": ";
    try {
      const auto j = nlohmann::json::parse(line);
      const auto case_id = j.at("case_id").get<std::string>();
      const auto index = j.at("record_index").get<std::size_t>();
      EntitySpan span{j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>(),
                      j.at("entity_type").get<std::string>()};
      if (!dataset.empty()) {
        if (index >= dataset.size()) throw ValidationError(where + "record_index out of range");
        if (dataset[index].case_id != case_id) throw ValidationError(where + "case_id does not match the record");
      }
      out[index].push_back(std::move(span));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + e.what());
    }
  }
  for (auto& [index, spans] : out) {
    std::sort(spans.begin(), spans.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  }
  return out;
}

std::string serialize_span(const std::string& case_id, std::size_t record_index, const EntitySpan& span) {
  nlohmann::ordered_json j;
  j["case_id"] = case_id;
  j["record_index"] = record_index;
  j["start"] = span.start;
  j["end"] = span.end;
  j["entity_type"] = span.entity_type;
  return j.dump();
}

std::vector<StanceExample> mask_examples(std::span<const StanceExample> examples, const EntityTagger& tagger,
                                         const std::map<std::size_t, std::vector<EntitySpan>>* spans) {
  std::vector<StanceExample> out;
  out.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto e = examples[i];
    std::vector<EntitySpan> found;
    if (spans != nullptr) {
      if (const auto it = spans->find(i); it != spans->end()) found = it->second;
    } else {
      found = tagger.tag(e.text);
    }
    e.text = ner_mask(e.text, found);
    e.masked = true;
    out.push_back(std::move(e));
  }
  return out;
}

DatasetSplit split(std::span<const StanceExample> examples, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("split fraction must lie in (0, 1)");
  if (examples.size() < 2) throw ValidationError("split needs at least 2 examples");
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  shuffle(std::span(order), rng);
  const auto n = static_cast<long long>(examples.size());
  const auto n_train = static_cast<std::size_t>(std::clamp(std::llround(fraction * static_cast<double>(n)), 1LL, n - 1));

  DatasetSplit out;
  out.seed = seed;
  out.fraction = fraction;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < n_train) {
      out.train.push_back(examples[order[i]]);
      out.train_index.push_back(order[i]);
    } else {
      out.test.push_back(examples[order[i]]);
      out.test_index.push_back(order[i]);
    }
  }
  return out;
}

std::optional<ClassSchema> parse_class_schema(std::string_view s) {
  if (s == "2" || s == "binary") return ClassSchema::binary;
  if (s == "3" || s == "three") return ClassSchema::three;
  return std::nullopt;
}

std::vector<Label> schema_labels(ClassSchema schema) {
  if (schema == ClassSchema::binary) return {Label::pro, Label::con};
  return {Label::pro, Label::con, Label::neutral};
}

std::vector<std::string> model_label_names(ClassSchema schema) {
  if (schema == ClassSchema::binary) return {"con", "pro"};
  return {"con", "pro", "neutral"};
}

int model_class_index(Label label, ClassSchema schema) {
  switch (label) {
    case Label::con: return 0;
    case Label::pro: return 1;
    case Label::neutral:
      if (schema == ClassSchema::binary) throw ValidationError("neutral label in a binary schema");
      return 2;
  }
  return 0;
}

std::string EvalResult::to_json() const {
  nlohmann::ordered_json j;
  j["macro_f1"] = macro_f1;
  j["accuracy"] = accuracy;
  nlohmann::ordered_json names = nlohmann::ordered_json::array();
  for (auto l : labels) names.push_back(to_string(l));
  j["labels"] = names;
  j["per_class_f1"] = per_class_f1;
  j["confusion"] = confusion;
  return j.dump(2) + "\n";
}

EvalResult evaluate(std::span<const Label> gold, std::span<const Label> predicted, ClassSchema schema) {
  if (gold.size() != predicted.size()) throw ValidationError("gold and predicted lengths differ");
  if (gold.empty()) throw ValidationError("evaluation needs at least one example");
  EvalResult r;
  r.labels = schema_labels(schema);
  const std::size_t k = r.labels.size();
  auto index = [&](Label l) -> std::size_t {
    for (std::size_t i = 0; i < k; ++i) {
      if (r.labels[i] == l) return i;
    }
    throw ValidationError("label '" + std::string(to_string(l)) + "' outside the evaluation schema");
  };
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) ++r.confusion[index(gold[i])][index(predicted[i])];

  std::size_t correct = 0;
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    correct += r.confusion[c][c];
    std::size_t gold_c = 0;
    std::size_t pred_c = 0;
    for (std::size_t j = 0; j < k; ++j) {
      gold_c += r.confusion[c][j];
      pred_c += r.confusion[j][c];
    }
    const double tp = static_cast<double>(r.confusion[c][c]);
    const double precision = pred_c == 0 ? 0.0 : tp / static_cast<double>(pred_c);
    const double recall = gold_c == 0 ? 0.0 : tp / static_cast<double>(gold_c);
    const double f1 = precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
    r.per_class_f1.push_back(f1);
    f1_sum += f1;
  }
  r.macro_f1 = f1_sum / static_cast<double>(k);
  r.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
  return r;
}

std::string truncate_for_scorer(std::string_view target, std::string_view text, std::size_t token_limit) {
  const auto target_tokens = text::split_whitespace(target);
  if (token_limit <= target_tokens.size() + 1) {
    throw ValidationError("token limit " + std::to_string(token_limit) + " leaves no room after a " +
                          std::to_string(target_tokens.size()) + "-token target");
  }
  std::string joined;
  joined.reserve(target.size() + text.size() + 7);
  joined.append(target).append(" [SEP] ").append(text);
  const auto tokens = text::split_whitespace(joined);
  if (tokens.size() <= token_limit) return joined;
  std::string out;
  for (std::size_t i = 0; i < token_limit; ++i) {
    if (i > 0) out += ' ';
    out.append(tokens[i]);
  }
  return out;
}

std::string serialize(const StanceExample& e) {
  nlohmann::ordered_json j;
  j["case_id"] = e.case_id;
  j["target"] = e.target;
  j["text"] = e.text;
  j["label"] = to_string(e.label);
  j["opinion_type"] = corpus::to_string(e.opinion_type);
  j["masked"] = e.masked;
  return j.dump();
}

StanceExample parse_stance_example(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    StanceExample e;
    e.case_id = j.at("case_id").get<std::string>();
    e.target = j.at("target").get<std::string>();
    e.text = j.at("text").get<std::string>();
    const auto label = parse_label(j.at("label").get<std::string>());
    if (!label) throw ValidationError("unknown label '" + j.at("label").get<std::string>() + "'");
    e.label = *label;
    const auto type = corpus::parse_opinion_type(j.at("opinion_type").get<std::string>());
    if (!type) throw ValidationError("unknown opinion_type");
    e.opinion_type = *type;
    e.masked = j.at("masked").get<bool>();
    if (text::is_blank(e.target) || text::is_blank(e.text)) throw ValidationError("target and text must be non-empty");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("bad dataset record: ") + ex.what());
  }
}

std::vector<StanceExample> load_dataset(const std::filesystem::path& path) {
  std::vector<StanceExample> out;
  std::size_t lineno = 0;
  for (const auto& line : io::read_lines(path)) {
    ++lineno;
    if (text::is_blank(line)) continue;
    try {
      out.push_back(parse_stance_example(line));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string dump_dataset(std::span<const StanceExample> examples) {
  std::string out;
  for (const auto& e : examples) out += serialize(e) + "\n";
  return out;
}

}  // namespace scsl::dataset
