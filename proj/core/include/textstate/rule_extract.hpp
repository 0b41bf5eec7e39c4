#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "textstate/lexicon.hpp"

namespace textstate {

enum class Source { rule, llm };

std::string_view to_string(Source s);

/// One candidate meaning before embedding: a restatement, the context under
/// which it holds, and an initial confidence.
struct RawInterpretation {
  std::string meaning;
  std::string context_label;
  double confidence = 1.0;  // in [0,1]; zero-confidence items are dropped at state construction
  Source source = Source::rule;
};

struct Segment {
  std::string text;
  std::string context_label;
};

/// Splits `text` at explicit-contradiction marker hits (adversative,
/// contrastive, concessive). Segments are the maximal marker-free spans
/// between hits, whitespace-trimmed, in order. Empty segments and segments
/// shorter than 2 non-whitespace characters are dropped.
///
/// The segment before the first marker takes the marker category's first
/// label (e.g. pre-adv); every segment after a marker takes the preceding
/// marker's second label (post-adv).
std::vector<Segment> segment_at_markers(std::string_view text, const std::vector<MarkerHit>& hits);

/// Stage 2a. Explicit-contradiction hits segment the text, one interpretation
/// per segment at confidence 1/n. Otherwise a hedging hit produces the two
/// hedge-scope readings: the bare proposition and its non-commitment
/// counterpart, at 0.5 each. All other categories yield no rule
/// interpretations.
std::vector<RawInterpretation> rule_extract(std::string_view text, const FeatureVector& fv);

}  // namespace textstate
