#include "textstate/lexicon.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "text_norm.hpp"
#include "textstate/errors.hpp"

namespace textstate {

using detail::NormalizedText;
using detail::Token;
using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kCategoryNames[kCategoryCount] = {
    "adversative", "contrastive", "concessive",  "hedging",
    "epistemic",   "modal",       "coordination", "scope",
};

constexpr std::string_view kGap = "...";

}  // namespace

std::string_view to_string(MarkerCategory c) {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

MarkerCategory category_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    if (kCategoryNames[i] == name) return static_cast<MarkerCategory>(i);
  }
  throw ValidationError("unknown marker category: '" + std::string(name) + "'");
}

const std::vector<std::string>& context_labels(MarkerCategory c) {
  static const std::vector<std::string> tables[kCategoryCount] = {
      {"pre-adv", "post-adv"},
      {"contrast-A", "contrast-B"},
      {"concede", "main"},
      {"hedge-scope", "hedge-scope-pos", "hedge-scope-neg"},
      {"epistemic-stance"},
      {"modal-world"},
      {"coord-A", "coord-B"},
      {"wide-scope", "narrow-scope"},
  };
  return tables[static_cast<std::size_t>(c)];
}

bool is_explicit_contradiction(MarkerCategory c) {
  return c == MarkerCategory::adversative || c == MarkerCategory::contrastive ||
         c == MarkerCategory::concessive;
}

std::string_view to_string(Language l) { return l == Language::en ? "en" : "jp"; }

Language language_from_string(std::string_view name) {
  if (name == "en") return Language::en;
  if (name == "jp") return Language::jp;
  throw ValidationError("unknown language: '" + std::string(name) + "'");
}

bool FeatureVector::has_conflict() const {
  return std::any_of(bits.begin(), bits.end(), [](bool b) { return b; });
}

namespace {

bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

void validate_entries(const std::vector<MarkerEntry>& entries) {
  std::set<std::tuple<std::string, Language, MarkerCategory>> seen;
  for (const auto& e : entries) {
    if (e.surface.empty()) throw ValidationError("marker surface must be non-empty");
    const auto gap = e.surface.find(kGap);
    if (gap != std::string::npos) {
      const std::string_view head = std::string_view(e.surface).substr(0, gap);
      const std::string_view tail = std::string_view(e.surface).substr(gap + kGap.size());
      if (detail::trim_ws(head).empty() || detail::trim_ws(tail).empty())
        throw ValidationError("gapped marker '" + e.surface + "' needs text on both sides of '...'");
      if (tail.find(kGap) != std::string_view::npos)
        throw ValidationError("marker '" + e.surface + "' has more than one gap");
    }
    if (!seen.insert({e.surface, e.language, e.category}).second)
      throw ValidationError("duplicate marker (" + e.surface + ", " +
                            std::string(to_string(e.language)) + ", " +
                            std::string(to_string(e.category)) + ")");
  }
}

}  // namespace

MarkerLexicon::MarkerLexicon(std::vector<MarkerEntry> entries, std::string version)
    : entries_(std::move(entries)), version_(std::move(version)) {
  for (auto& e : entries_) e.surface = detail::normalize_copy(e.surface);
  validate_entries(entries_);
}

const MarkerLexicon& MarkerLexicon::builtin() {
  static const MarkerLexicon lex = [] {
    using C = MarkerCategory;
    using L = Language;
    const auto W = BoundaryRule::word_bounded;
    const auto S = BoundaryRule::substring;
    std::vector<MarkerEntry> v = {
        // English
        {"but", L::en, C::adversative, W},
        {"however", L::en, C::adversative, W},
        {"yet", L::en, C::adversative, W},
        {"although", L::en, C::adversative, W},
        {"on the other hand", L::en, C::contrastive, W},
        {"whereas", L::en, C::contrastive, W},
        {"even though", L::en, C::concessive, W},
        {"despite", L::en, C::concessive, W},
        {"maybe", L::en, C::hedging, W},
        {"perhaps", L::en, C::hedging, W},
        {"might", L::en, C::hedging, W},
        {"i think", L::en, C::epistemic, W},
        {"i believe", L::en, C::epistemic, W},
        {"it seems", L::en, C::epistemic, W},
        {"could", L::en, C::modal, W},
        {"would", L::en, C::modal, W},
        {"should", L::en, C::modal, W},
        {"both ... and", L::en, C::coordination, W},
        {"either ... or", L::en, C::coordination, W},
        {"all ... not", L::en, C::scope, W},
        {"every ... some", L::en, C::scope, W},
        // Japanese, romanized
        {"kedo", L::jp, C::adversative, W},
        {"demo", L::jp, C::adversative, W},
        {"shikashi", L::jp, C::adversative, W},
        {"daga", L::jp, C::adversative, W},
        {"ippou de", L::jp, C::contrastive, W},
        {"hanmen", L::jp, C::contrastive, W},
        {"nimo kakawarazu", L::jp, C::concessive, W},
        {"kamoshirenai", L::jp, C::hedging, W},
        {"tabun", L::jp, C::hedging, W},
        {"to omou", L::jp, C::epistemic, W},
        {"ki ga suru", L::jp, C::epistemic, W},
        {"beki", L::jp, C::modal, W},
        {"hazu", L::jp, C::modal, W},
        {"darou", L::jp, C::modal, W},
        {"mo ... mo", L::jp, C::coordination, W},
        {"ka ... ka", L::jp, C::coordination, W},
        // Japanese, native script (substring: markers fuse into surrounding
        // morphology, e.g. だけど contains けど)
        {"けど", L::jp, C::adversative, S},
        {"でも", L::jp, C::adversative, S},
        {"しかし", L::jp, C::adversative, S},
        {"だが", L::jp, C::adversative, S},
        {"一方で", L::jp, C::contrastive, S},
        {"反面", L::jp, C::contrastive, S},
        {"にもかかわらず", L::jp, C::concessive, S},
        {"かもしれない", L::jp, C::hedging, S},
        {"たぶん", L::jp, C::hedging, S},
        {"と思う", L::jp, C::epistemic, S},
        {"気がする", L::jp, C::epistemic, S},
        {"べき", L::jp, C::modal, S},
        {"はず", L::jp, C::modal, S},
        {"だろう", L::jp, C::modal, S},
        {"も...も", L::jp, C::coordination, S},
        {"か...か", L::jp, C::coordination, S},
        // No Japanese scope markers: that cell of the taxonomy is empty.
    };
    return MarkerLexicon(std::move(v), "builtin-1");
  }();
  return lex;
}

namespace {

std::string_view boundary_name(BoundaryRule b) {
  return b == BoundaryRule::word_bounded ? "word-bounded" : "substring";
}

BoundaryRule boundary_from_string(std::string_view name) {
  if (name == "word-bounded") return BoundaryRule::word_bounded;
  if (name == "substring") return BoundaryRule::substring;
  throw ValidationError("unknown boundary rule: '" + std::string(name) + "'");
}

int line_of_byte(std::string_view content, std::size_t byte) {
  const std::size_t stop = std::min(byte, content.size());
  return 1 + static_cast<int>(std::count(content.begin(), content.begin() + stop, '\n'));
}

}  // namespace

MarkerLexicon MarkerLexicon::from_json(std::string_view content) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("lexicon: ") + e.what(), line_of_byte(content, e.byte));
  }
  if (!doc.is_array()) throw ValidationError("lexicon file must be a JSON array of entries");
  std::vector<MarkerEntry> entries;
  entries.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const std::string where = "lexicon entry " + std::to_string(i);
    if (!item.is_object()) throw ValidationError(where + ": expected an object");
    if (!item.contains("surface") || !item["surface"].is_string())
      throw ValidationError(where + ": missing string field 'surface'");
    if (!item.contains("language") || !item["language"].is_string())
      throw ValidationError(where + ": missing string field 'language'");
    if (!item.contains("category") || !item["category"].is_string())
      throw ValidationError(where + ": missing string field 'category'");
    MarkerEntry e;
    e.surface = item["surface"].get<std::string>();
    e.language = language_from_string(item["language"].get<std::string>());
    e.category = category_from_string(item["category"].get<std::string>());
    if (item.contains("boundary")) {
      e.boundary = boundary_from_string(item["boundary"].get<std::string>());
    } else if (e.language == Language::en || is_ascii(e.surface)) {
      e.boundary = BoundaryRule::word_bounded;
    } else {
      e.boundary = BoundaryRule::substring;
    }
    entries.push_back(std::move(e));
  }
  return MarkerLexicon(std::move(entries), "file");
}

std::string MarkerLexicon::to_json() const {
  json arr = json::array();
  for (const auto& e : entries_) {
    arr.push_back({{"surface", e.surface},
                   {"language", std::string(to_string(e.language))},
                   {"category", std::string(to_string(e.category))},
                   {"boundary", std::string(boundary_name(e.boundary))}});
  }
  return arr.dump(2) + "\n";
}

namespace {

struct NormSpan {
  std::size_t begin;
  std::size_t end;
};

// Occurrences of a word-bounded pattern: the pattern's tokens must appear as
// a consecutive token run. Robust to punctuation and repeated spaces.
std::vector<NormSpan> find_token_seq(const std::vector<Token>& text_tokens,
                                     const std::vector<Token>& pattern_tokens) {
  std::vector<NormSpan> out;
  if (pattern_tokens.empty() || text_tokens.size() < pattern_tokens.size()) return out;
  const std::size_t n = text_tokens.size(), m = pattern_tokens.size();
  for (std::size_t i = 0; i + m <= n; ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < m; ++k) {
      if (text_tokens[i + k].text != pattern_tokens[k].text) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back({text_tokens[i].begin, text_tokens[i + m - 1].end});
  }
  return out;
}

std::vector<NormSpan> find_substring(std::string_view text, std::string_view pattern) {
  std::vector<NormSpan> out;
  if (pattern.empty()) return out;
  std::size_t pos = 0;
  while ((pos = text.find(pattern, pos)) != std::string_view::npos) {
    out.push_back({pos, pos + pattern.size()});
    ++pos;  // overlapping occurrences are all recorded
  }
  return out;
}

std::vector<NormSpan> find_part(const NormalizedText& norm, const std::vector<Token>& text_tokens,
                                std::string_view part, BoundaryRule boundary) {
  if (boundary == BoundaryRule::word_bounded) {
    const auto pattern_tokens = detail::word_tokens(part);
    return find_token_seq(text_tokens, pattern_tokens);
  }
  return find_substring(norm.text, part);
}

// Gapped pattern: pair part-1 occurrences with the nearest following part-2
// occurrence, greedily left to right without reuse.
std::vector<NormSpan> find_gapped(const std::vector<NormSpan>& firsts,
                                  const std::vector<NormSpan>& seconds) {
  std::vector<NormSpan> out;
  std::size_t j = 0;
  for (const auto& a : firsts) {
    while (j < seconds.size() && seconds[j].begin < a.end) ++j;
    if (j == seconds.size()) break;
    out.push_back({a.begin, seconds[j].end});
    ++j;
  }
  return out;
}

}  // namespace

FeatureVector detect_conflict_markers(std::string_view text, const MarkerLexicon& lexicon,
                                      LanguageFilter language) {
  if (detail::trim_ws(text).empty()) throw EmptyInputError();

  const NormalizedText norm = detail::normalize_for_match(text);
  const std::vector<Token> tokens = detail::word_tokens(norm.text);

  FeatureVector fv;
  for (const auto& entry : lexicon.entries()) {
    if (language == LanguageFilter::en && entry.language != Language::en) continue;
    if (language == LanguageFilter::jp && entry.language != Language::jp) continue;

    std::vector<NormSpan> spans;
    const auto gap = entry.surface.find(kGap);
    if (gap == std::string::npos) {
      spans = find_part(norm, tokens, entry.surface, entry.boundary);
    } else {
      const auto head = detail::trim_ws(std::string_view(entry.surface).substr(0, gap));
      const auto tail = detail::trim_ws(std::string_view(entry.surface).substr(gap + kGap.size()));
      spans = find_gapped(find_part(norm, tokens, head, entry.boundary),
                          find_part(norm, tokens, tail, entry.boundary));
    }
    for (const auto& s : spans) {
      fv.hits.push_back({entry, norm.orig(s.begin), norm.orig(s.end)});
    }
  }

  std::sort(fv.hits.begin(), fv.hits.end(), [](const MarkerHit& a, const MarkerHit& b) {
    return std::tie(a.begin, a.end, a.entry.category, a.entry.surface) <
           std::tie(b.begin, b.end, b.entry.category, b.entry.surface);
  });
  for (const auto& h : fv.hits) fv.bits[static_cast<std::size_t>(h.entry.category)] = true;
  return fv;
}

}  // namespace textstate
