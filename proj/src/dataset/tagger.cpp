#include <algorithm>
#include <array>
#include <set>

#include "scsl/core/text.hpp"
#include "scsl/dataset/dataset.hpp"

namespace scsl::dataset {
namespace {

const std::set<std::string_view> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",    "July",
    "August",  "September", "October", "November", "December", "Jan",    "Feb",
    "Mar",     "Apr",       "Jun",      "Jul",      "Aug",      "Sep",     "Sept",
    "Oct",     "Nov",       "Dec"};

const std::set<std::string_view> kHonorifics = {"Mr.", "Mrs.", "Ms.", "Dr.", "Justice", "Judge", "Chief"};

const std::set<std::string_view> kLawHeads = {"Act",  "Acts",        "Amendment", "Amendments",
                                              "Clause", "Code",      "Constitution", "Statute"};

const std::set<std::string_view> kConnectors = {"of", "the", "and", "for", "de"};

// Capitalized words that should not open an entity run.
const std::set<std::string_view> kStopCapitals = {
    "The",  "A",    "An",    "In",    "On",      "At",    "But",   "And",  "Or",   "If",    "It",
    "We",   "I",    "This",  "That",  "These",   "Those", "Our",   "His",  "Her",  "Its",   "Their",
    "For",  "To",   "By",    "As",    "When",    "Where", "While", "Because", "Although", "Once",
    "See",  "Id",   "Yes",   "No",    "Mr",      "Mrs",   "Ms",    "Dr",   "Justice", "Judge", "Chief",
    "Under", "Here", "There", "Thus", "However", "Accordingly", "Nor", "Not", "He", "She", "They"};

struct Tok {
  std::size_t begin;  // whole token, bytes
  std::size_t end;
  std::size_t core_begin;  // token minus edge punctuation
  std::size_t core_end;
  std::string_view raw;
  std::string_view core;
};

bool alnum(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || u >= 0x80;
}

bool placeholder(const Tok& t) { return t.raw.size() > 2 && t.raw.front() == '[' && t.raw.find(']') != std::string_view::npos; }

bool capitalized(const Tok& t) {
  return !t.core.empty() && t.core.front() >= 'A' && t.core.front() <= 'Z' && !placeholder(t);
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_day(const Tok& t) {
  if (!all_digits(t.core) || t.core.size() > 2) return false;
  const int v = std::stoi(std::string(t.core));
  return v >= 1 && v <= 31;
}

bool is_year(const Tok& t) {
  if (!all_digits(t.core) || t.core.size() != 4) return false;
  const int v = std::stoi(std::string(t.core));
  return v >= 1600 && v <= 2099;
}

// Token ends a clause, so an entity run must not continue past it.
bool ends_clause(const Tok& t) {
  if (t.raw.empty()) return true;
  const char last = t.raw.back();
  return last == ',' || last == ';' || last == ':' || last == '?' || last == '!' ||
         (last == '.' && t.raw != "v." && t.raw.size() > 2);
}

}  // namespace

std::vector<EntitySpan> GazetteerTagger::tag(std::string_view text) const {
  std::vector<Tok> toks;
  for (const auto& r : text::whitespace_tokens(text)) {
    Tok t{r.begin, r.end, r.begin, r.end, text.substr(r.begin, r.end - r.begin), {}};
    while (t.core_begin < t.core_end && !alnum(text[t.core_begin])) ++t.core_begin;
    while (t.core_end > t.core_begin && !alnum(text[t.core_end - 1])) --t.core_end;
    t.core = text.substr(t.core_begin, t.core_end - t.core_begin);
    toks.push_back(t);
  }
  const std::size_t n = toks.size();
  std::vector<bool> covered(n, false);
  struct Found {
    std::size_t first;
    std::size_t last;
    std::string_view type;
  };
  std::vector<Found> found;
  auto claim = [&](std::size_t first, std::size_t last, std::string_view type) {
    for (std::size_t k = first; k <= last; ++k) covered[k] = true;
    found.push_back({first, last, type});
  };

  // Dates: "October 10", "October 10, 1990", "May 1990", bare years.
  for (std::size_t i = 0; i < n; ++i) {
    if (kMonths.contains(toks[i].core) && !ends_clause(toks[i]) && i + 1 < n &&
        (is_day(toks[i + 1]) || is_year(toks[i + 1]))) {
      std::size_t last = i + 1;
      if (is_day(toks[i + 1]) && i + 2 < n && is_year(toks[i + 2])) last = i + 2;
      claim(i, last, "DATE");
      i = last;
    } else if (is_year(toks[i])) {
      claim(i, i, "DATE");
    }
  }

  auto cap_free = [&](std::size_t k) {
    return !covered[k] && capitalized(toks[k]) && !kStopCapitals.contains(toks[k].core);
  };

  // Party names around "v."
  for (std::size_t i = 0; i < n; ++i) {
    if (toks[i].raw != "v." && toks[i].raw != "v") continue;
    if (i > 0 && cap_free(i - 1) && !ends_clause(toks[i - 1])) {
      std::size_t first = i - 1;
      while (first > 0 && cap_free(first - 1) && !ends_clause(toks[first - 1])) --first;
      claim(first, i - 1, "ORG");
    }
    if (i + 1 < n && cap_free(i + 1)) {
      std::size_t last = i + 1;
      while (last + 1 < n && !ends_clause(toks[last])) {
        if (cap_free(last + 1)) {
          ++last;
        } else if (last + 2 < n && kConnectors.contains(toks[last + 1].raw) && !ends_clause(toks[last + 1]) &&
                   cap_free(last + 2)) {
          last += 2;
        } else {
          break;
        }
      }
      claim(i + 1, last, "ORG");
      i = last;
    }
  }

  // Names after honorifics.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!kHonorifics.contains(toks[i].raw) || covered[i]) continue;
    std::size_t j = i + 1;
    while (j < n && kHonorifics.contains(toks[j].raw)) ++j;
    if (j >= n || !cap_free(j)) continue;
    std::size_t last = j;
    while (last + 1 < n && last - j < 2 && !ends_clause(toks[last]) && cap_free(last + 1)) ++last;
    claim(j, last, "PERSON");
    i = last;
  }

  // Remaining capitalized runs: laws, then multi-word names.
  for (std::size_t i = 0; i < n; ++i) {
    if (!cap_free(i)) continue;
    std::size_t last = i;
    std::size_t words = 1;
    while (!ends_clause(toks[last]) && last + 1 < n) {
      if (cap_free(last + 1)) {
        ++last;
        ++words;
      } else if (last + 2 < n && !covered[last + 1] && kConnectors.contains(toks[last + 1].raw) &&
                 cap_free(last + 2)) {
        last += 2;
        ++words;
      } else {
        break;
      }
    }
    if (kLawHeads.contains(toks[last].core) && (words >= 2 || toks[last].core == "Constitution")) {
      claim(i, last, kLawEntity);
    } else if (words >= 2) {
      claim(i, last, "ORG");
    }
    i = last;
  }

  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const auto offsets = text::codepoint_byte_offsets(text);
  auto to_cp = [&](std::size_t byte) {
    return static_cast<std::size_t>(std::lower_bound(offsets.begin(), offsets.end(), byte) - offsets.begin());
  };
  std::vector<EntitySpan> spans;
  spans.reserve(found.size());
  for (const auto& f : found) {
    spans.push_back({to_cp(toks[f.first].core_begin), to_cp(toks[f.last].core_end), std::string(f.type)});
  }
  return spans;
}

}  // namespace scsl::dataset
