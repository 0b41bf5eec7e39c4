#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace textstate {

/// The eight conflict-marker categories. Order is canonical: it fixes the bit
/// layout of FeatureVector and every serialized bits array.
enum class MarkerCategory {
  adversative,
  contrastive,
  concessive,
  hedging,
  epistemic,
  modal,
  coordination,
  scope,
};

inline constexpr std::size_t kCategoryCount = 8;

std::string_view to_string(MarkerCategory c);
MarkerCategory category_from_string(std::string_view name);  // throws ValidationError

/// Context labels a category can assign to extracted interpretations.
/// Two-label categories split into (first, second) clause labels.
const std::vector<std::string>& context_labels(MarkerCategory c);

/// Categories whose markers split a sentence into opposing clauses.
bool is_explicit_contradiction(MarkerCategory c);

enum class Language { en, jp };

std::string_view to_string(Language l);
Language language_from_string(std::string_view name);

/// Restricts which entries detection consults. `any` matches the union of
/// both languages; each entry still uses its own boundary rule.
enum class LanguageFilter { en, jp, any };

enum class BoundaryRule { word_bounded, substring };

/// One marker pattern. A surface containing "..." is a gapped pattern: the
/// part before the gap must be followed, anywhere later in the text, by the
/// part after it ("both...and", "mo...mo").
struct MarkerEntry {
  std::string surface;  // stored case/width-normalized
  Language language = Language::en;
  MarkerCategory category = MarkerCategory::adversative;
  BoundaryRule boundary = BoundaryRule::word_bounded;
};

class MarkerLexicon {
 public:
  /// The compiled-in default covering the full marker taxonomy for English
  /// and Japanese (romanized and native script).
  static const MarkerLexicon& builtin();

  /// Parses the JSON lexicon format: an array of
  /// {surface, language, category, boundary} objects. boundary is optional
  /// (defaults to word-bounded for en, substring for native-script jp).
  static MarkerLexicon from_json(std::string_view content);

  MarkerLexicon(std::vector<MarkerEntry> entries, std::string version);

  const std::vector<MarkerEntry>& entries() const { return entries_; }
  const std::string& version() const { return version_; }
  std::size_t size() const { return entries_.size(); }

  /// Serializes back to the lexicon file format.
  std::string to_json() const;

 private:
  std::vector<MarkerEntry> entries_;
  std::string version_;
};

/// One pattern match. begin/end are byte offsets into the original text; for
/// gapped patterns the span covers from the first part to the end of the
/// second.
struct MarkerHit {
  MarkerEntry entry;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// The binary feature vector f produced by conflict detection, plus the
/// underlying matches. bits[c] is set iff hits contains a match of category c.
struct FeatureVector {
  std::array<bool, kCategoryCount> bits{};
  std::vector<MarkerHit> hits;

  bool test(MarkerCategory c) const { return bits[static_cast<std::size_t>(c)]; }
  /// ||f||_1 > 0: the has_conflict predicate.
  bool has_conflict() const;
};

/// Stage 1: scans `text` for lexicon markers and returns the feature vector.
/// Deterministic; hits are sorted by (begin, end, category). Cost is linear
/// in the text length for a fixed lexicon.
///
/// Throws EmptyInputError if the text is empty after whitespace trimming.
FeatureVector detect_conflict_markers(std::string_view text, const MarkerLexicon& lexicon,
                                      LanguageFilter language = LanguageFilter::any);

}  // namespace textstate
