#include "scsl/corpus/types.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"

#include "scsl/core/error.hpp"
#include "scsl/core/io.hpp"
#include "scsl/core/text.hpp"

namespace scsl::corpus {

std::string_view to_string(SpeakerRole role) {
  switch (role) {
    case SpeakerRole::justice: return "justice";
    case SpeakerRole::advocate: return "advocate";
    case SpeakerRole::other: return "other";
  }
  return "other";
}

std::string_view to_string(OpinionType type) {
  switch (type) {
    case OpinionType::majority: return "majority";
    case OpinionType::concurring: return "concurring";
    case OpinionType::dissenting: return "dissenting";
    case OpinionType::per_curiam: return "per_curiam";
  }
  return "majority";
}

std::string_view to_string(WinningParty party) {
  switch (party) {
    case WinningParty::petitioner: return "petitioner";
    case WinningParty::respondent: return "respondent";
    case WinningParty::unclear: return "unclear";
  }
  return "unclear";
}

std::optional<SpeakerRole> parse_speaker_role(std::string_view s) {
  if (s == "justice") return SpeakerRole::justice;
  if (s == "advocate") return SpeakerRole::advocate;
  if (s == "other") return SpeakerRole::other;
  return std::nullopt;
}

std::optional<OpinionType> parse_opinion_type(std::string_view s) {
  if (s == "majority") return OpinionType::majority;
  if (s == "concurring") return OpinionType::concurring;
  if (s == "dissenting") return OpinionType::dissenting;
  if (s == "per_curiam") return OpinionType::per_curiam;
  return std::nullopt;
}

std::optional<WinningParty> parse_winning_party(std::string_view s) {
  if (s == "petitioner") return WinningParty::petitioner;
  if (s == "respondent") return WinningParty::respondent;
  if (s == "unclear") return WinningParty::unclear;
  return std::nullopt;
}

EmotionLexicon EmotionLexicon::load_tsv(const std::string& path) {
  EmotionLexicon lex;
  std::size_t lineno = 0;
  for (const auto& line : io::read_lines(path)) {
    ++lineno;
    if (text::is_blank(line)) continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected word<TAB>emotion<TAB>flag");
    }
    const auto word = text::trim(std::string_view(line).substr(0, tab1));
    const auto emotion = text::trim(std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1));
    const auto flag = text::trim(std::string_view(line).substr(tab2 + 1));
    if (flag != "0" && flag != "1") {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": flag must be 0 or 1");
    }
    if (flag == "1") lex.add(word, emotion);
  }
  return lex;
}

void EmotionLexicon::add(std::string_view word, std::string_view emotion) {
  const auto key = text::normalize_token(word);
  if (key.empty()) throw ValidationError("lexicon word is empty after normalization: '" + std::string(word) + "'");
  if (text::split_whitespace(word).size() != 1) {
    throw ValidationError("lexicon word must be a single token: '" + std::string(word) + "'");
  }
  entries_[key].insert(std::string(emotion));
}

bool EmotionLexicon::contains(std::string_view word) const { return tags(word) != nullptr; }

const std::set<std::string>* EmotionLexicon::tags(std::string_view word) const {
  const auto key = text::normalize_token(word);
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

TargetSet TargetSet::load(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  TargetSet set;
  auto read_list = [&](const char* key, std::vector<std::string>& out) {
    if (!doc.is_object() || !doc.contains(key) || !doc[key].is_array()) {
      throw ValidationError(path + ": missing string array '" + key + "'");
    }
    for (const auto& item : doc[key]) {
      if (!item.is_string()) throw ValidationError(path + ": '" + key + "' must contain strings");
      out.push_back(item.get<std::string>());
    }
  };
  read_list("liberal", set.liberal);
  read_list("conservative", set.conservative);
  set.validate();
  return set;
}

void TargetSet::validate() const {
  for (const auto* list : {&liberal, &conservative}) {
    for (const auto& t : *list) {
      if (text::is_blank(t)) throw ValidationError("target statements must be non-empty");
    }
  }
  for (const auto& l : liberal) {
    for (const auto& c : conservative) {
      if (l == c) throw ValidationError("target appears in both lists: '" + l + "'");
    }
  }
}

void MetricSeries::insert(std::string entity, int year, double value) {
  if (!std::isfinite(value)) {
    throw ValidationError(name_ + ": non-finite value for (" + entity + ", " + std::to_string(year) + ")");
  }
  auto key = std::make_pair(std::move(entity), year);
  if (points_.contains(key)) {
    throw ValidationError(name_ + ": duplicate point (" + key.first + ", " + std::to_string(year) + ")");
  }
  points_.emplace(std::move(key), value);
}

std::optional<double> MetricSeries::get(std::string_view entity, int year) const {
  const auto it = points_.find(std::make_pair(std::string(entity), year));
  if (it == points_.end()) return std::nullopt;
  return it->second;
}

std::map<int, double> MetricSeries::by_year(std::string_view entity) const {
  std::map<int, double> out;
  for (auto it = points_.lower_bound({std::string(entity), std::numeric_limits<int>::min()});
       it != points_.end() && it->first.first == entity; ++it) {
    out.emplace(it->first.second, it->second);
  }
  return out;
}

std::vector<std::string> MetricSeries::entities() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : points_) {
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  }
  return out;
}

}  // namespace scsl::corpus
