#include "scsl/scorer/scorer.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <cmath>
#include <cstring>

#include "json.hpp"
#include "scsl/core/error.hpp"
#include "scsl/core/io.hpp"

namespace scsl::scorer {

std::string_view to_string(Convention c) {
  return c == Convention::signed_predicted ? "signed_predicted" : "expectation";
}

std::optional<Convention> parse_convention(std::string_view s) {
  if (s == "signed_predicted") return Convention::signed_predicted;
  if (s == "expectation") return Convention::expectation;
  return std::nullopt;
}

std::string_view to_string(Task t) { return t == Task::stance ? "stance" : "ideology"; }

std::optional<Task> parse_task(std::string_view s) {
  if (s == "stance") return Task::stance;
  if (s == "ideology") return Task::ideology;
  return std::nullopt;
}

double signed_score(std::span<const double> proba, Convention convention) {
  if (proba.size() != 2) {
    throw ValidationError("signed score needs a binary probability vector, got " + std::to_string(proba.size()) +
                          " classes");
  }
  const double neg = proba[0];
  const double pos = proba[1];
  double s = 0.0;
  if (convention == Convention::expectation) {
    s = pos - neg;
  } else if (pos > neg) {
    s = pos;
  } else if (neg > pos) {
    s = -neg;
  }
  if (!std::isfinite(s)) throw ValidationError("non-finite probability");
  return std::clamp(s, -1.0, 1.0);
}

const std::vector<std::string>& Classifier::labels() const {
  return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.labels; }, head);
}

std::string_view Classifier::kind() const {
  switch (head.index()) {
    case 0: return "lr";
    case 1: return "mlp";
    default: return "majority";
  }
}

std::vector<double> Classifier::proba(std::string_view target, std::string_view text) const {
  const auto x = featurize(vocab, target, text);
  return std::visit([&x](const auto& m) { return predict_proba(m, x); }, head);
}

namespace {

using nlohmann::ordered_json;

void append_f64(std::string& out, std::span<const double> values) {
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      out.push_back(static_cast<char>(bits & 0xFF));
      bits >>= 8;
    }
  }
}

class TensorReader {
 public:
  explicit TensorReader(std::string_view data) : data_(data) {}

  std::vector<double> take(std::size_t count) {
    if (count > (data_.size() - pos_) / 8) throw ValidationError("model file truncated");
    std::vector<double> out(count);
    for (auto& v : out) {
      std::uint64_t bits = 0;
      for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(data_[pos_ + static_cast<std::size_t>(b)]);
      v = std::bit_cast<double>(bits);
      pos_ += 8;
    }
    return out;
  }

  [[nodiscard]] bool exhausted() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_classifier(const Classifier& c) {
  ordered_json header;
  header["format_version"] = kModelFormatVersion;
  header["task"] = to_string(c.task);
  header["kind"] = c.kind();
  header["labels"] = c.labels();
  header["document_count"] = c.vocab.document_count();
  header["terms"] = c.vocab.terms();

  std::string payload;
  ordered_json tensors = ordered_json::array();
  auto tensor = [&](const char* name, std::span<const double> values) {
    tensors.push_back({{"name", name}, {"count", values.size()}});
    append_f64(payload, values);
  };
  tensor("idf", c.vocab.idf());
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        header["input_dim"] = m.input_dim;
        if constexpr (std::is_same_v<T, LinearModel>) {
          tensor("weights", m.weights);
          tensor("bias", m.bias);
        } else if constexpr (std::is_same_v<T, MlpModel>) {
          header["hidden_dim"] = m.hidden_dim;
          tensor("w1", m.w1);
          tensor("b1", m.b1);
          tensor("w2", m.w2);
          tensor("b2", m.b2);
        } else {
          header["predicted"] = m.predicted;
        }
      },
      c.head);
  header["tensors"] = tensors;
  header["encoding"] = "f64le";

  std::string out(kModelMagic);
  out += '\n';
  out += header.dump();
  out += '\n';
  out += payload;
  return out;
}

Classifier parse_classifier(std::string_view contents) {
  const auto nl1 = contents.find('\n');
  if (nl1 == std::string_view::npos || contents.substr(0, nl1) != kModelMagic) {
    throw ValidationError("not a model file (missing SCSL1 magic)");
  }
  const auto nl2 = contents.find('\n', nl1 + 1);
  if (nl2 == std::string_view::npos) throw ValidationError("model file header truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(contents.substr(nl1 + 1, nl2 - nl1 - 1));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model header: ") + e.what());
  }
  TensorReader reader(contents.substr(nl2 + 1));

  try {
    if (header.at("format_version").get<int>() != kModelFormatVersion) {
      throw ValidationError("unsupported model format version");
    }
    if (header.at("encoding").get<std::string>() != "f64le") throw ValidationError("unsupported tensor encoding");
    std::map<std::string, std::size_t> counts;
    for (const auto& t : header.at("tensors")) counts[t.at("name").get<std::string>()] = t.at("count").get<std::size_t>();
    auto take = [&](const char* name) { return reader.take(counts.at(name)); };

    Classifier c;
    const auto task = parse_task(header.at("task").get<std::string>());
    if (!task) throw ValidationError("unknown task in model header");
    c.task = *task;
    auto terms = header.at("terms").get<std::vector<std::string>>();
    c.vocab = TfidfVocab(std::move(terms), take("idf"), header.at("document_count").get<std::size_t>());

    const auto kind = header.at("kind").get<std::string>();
    const auto labels = header.at("labels").get<std::vector<std::string>>();
    const auto input_dim = header.at("input_dim").get<std::size_t>();
    if (input_dim != 2 * c.vocab.size()) throw ValidationError("model input dimension does not match vocabulary");
    if (kind == "lr") {
      LinearModel m;
      m.labels = labels;
      m.input_dim = input_dim;
      m.weights = take("weights");
      m.bias = take("bias");
      if (m.labels.size() < 2 || m.weights.size() != m.rows() * input_dim || m.bias.size() != m.rows()) {
        throw ValidationError("inconsistent linear model dimensions");
      }
      c.head = std::move(m);
    } else if (kind == "mlp") {
      MlpModel m;
      m.labels = labels;
      m.input_dim = input_dim;
      m.hidden_dim = header.at("hidden_dim").get<std::size_t>();
      m.w1 = take("w1");
      m.b1 = take("b1");
      m.w2 = take("w2");
      m.b2 = take("b2");
      const std::size_t k = m.labels.size();
      if ((k != 2 && k != 3) || m.w1.size() != m.hidden_dim * input_dim || m.b1.size() != m.hidden_dim ||
          m.w2.size() != k * m.hidden_dim || m.b2.size() != k) {
        throw ValidationError("inconsistent MLP dimensions");
      }
      c.head = std::move(m);
    } else if (kind == "majority") {
      MajorityModel m;
      m.labels = labels;
      m.input_dim = input_dim;
      m.predicted = header.at("predicted").get<std::size_t>();
      if (m.predicted >= m.labels.size()) throw ValidationError("majority label out of range");
      c.head = std::move(m);
    } else {
      throw ValidationError("unknown model kind '" + kind + "'");
    }
    if (!reader.exhausted()) throw ValidationError("trailing bytes after model tensors");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model header: ") + e.what());
  } catch (const std::out_of_range&) {
    throw ValidationError("model header is missing a tensor");
  }
}

void save_classifier(const Classifier& c, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize_classifier(c));
}

Classifier load_classifier(const std::filesystem::path& path) { return parse_classifier(io::read_file(path)); }

BuiltinScorer::BuiltinScorer(std::shared_ptr<const Classifier> classifier, Convention convention)
    : ProbabilisticScorer(convention), classifier_(std::move(classifier)) {
  if (!classifier_) throw ValidationError("builtin scorer needs a classifier");
}

std::vector<double> BuiltinScorer::stance_proba(std::string_view target, std::string_view text) const {
  return classifier_->proba(target, text);
}

std::vector<double> BuiltinScorer::ideology_proba(std::string_view text) const { return classifier_->proba("", text); }

std::string BuiltinScorer::predict_label(std::string_view target, std::string_view text) const {
  const auto p = classifier_->proba(target, text);
  return classifier_->labels()[argmax(p)];
}

}  // namespace scsl::scorer
