#include "textstate/rule_extract.hpp"

#include <algorithm>

#include "text_norm.hpp"

namespace textstate {

std::string_view to_string(Source s) { return s == Source::rule ? "rule" : "llm"; }

namespace {

constexpr std::size_t kMinSegmentChars = 2;  // non-whitespace code points

std::vector<MarkerHit> contradiction_hits(const std::vector<MarkerHit>& hits) {
  std::vector<MarkerHit> out;
  for (const auto& h : hits) {
    if (is_explicit_contradiction(h.entry.category)) out.push_back(h);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const MarkerHit& a, const MarkerHit& b) { return a.begin < b.begin; });
  // Overlapping marker spans would cut the same characters twice; keep the
  // earliest hit of an overlapping run.
  std::vector<MarkerHit> kept;
  for (const auto& h : out) {
    if (!kept.empty() && h.begin < kept.back().end) continue;
    kept.push_back(h);
  }
  return kept;
}

const std::string& pre_label(MarkerCategory c) { return context_labels(c)[0]; }
const std::string& post_label(MarkerCategory c) { return context_labels(c)[1]; }

std::string collapse_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool prev_space = false;
  for (char c : s) {
    const bool space = (c == ' ' || c == '\t');
    if (space && prev_space) continue;
    out.push_back(space ? ' ' : c);
    prev_space = space;
  }
  return out;
}

}  // namespace

std::vector<Segment> segment_at_markers(std::string_view text, const std::vector<MarkerHit>& hits) {
  const auto markers = contradiction_hits(hits);
  std::vector<Segment> out;
  if (markers.empty()) return out;

  std::size_t cursor = 0;
  std::string label = pre_label(markers.front().entry.category);
  for (std::size_t i = 0; i <= markers.size(); ++i) {
    const std::size_t end = (i < markers.size()) ? markers[i].begin : text.size();
    const std::string_view piece = detail::trim_ws(text.substr(cursor, end - cursor));
    if (detail::count_nonspace_codepoints(piece) >= kMinSegmentChars) {
      out.push_back({std::string(piece), label});
    }
    if (i < markers.size()) {
      cursor = markers[i].end;
      label = post_label(markers[i].entry.category);
    }
  }
  return out;
}

namespace {

std::vector<RawInterpretation> hedge_variants(std::string_view text,
                                              const std::vector<MarkerHit>& hits) {
  // Cut every hedging hit span out of the text; the remainder is the bare
  // proposition the hedge was scoped over.
  std::vector<std::pair<std::size_t, std::size_t>> cuts;
  for (const auto& h : hits) {
    if (h.entry.category == MarkerCategory::hedging) cuts.emplace_back(h.begin, h.end);
  }
  std::sort(cuts.begin(), cuts.end());
  std::string remainder;
  std::size_t cursor = 0;
  for (const auto& [b, e] : cuts) {
    if (b > cursor) remainder.append(text.substr(cursor, b - cursor));
    cursor = std::max(cursor, e);
  }
  remainder.append(text.substr(cursor));

  std::string proposition = std::string(detail::trim_ws(collapse_spaces(remainder)));
  if (detail::count_nonspace_codepoints(proposition) < kMinSegmentChars) {
    proposition = std::string(detail::trim_ws(text));  // hedge was (almost) the whole text
  }

  return {
      {proposition, "hedge-scope-pos", 0.5, Source::rule},
      {"it is possible that not: " + proposition, "hedge-scope-neg", 0.5, Source::rule},
  };
}

}  // namespace

std::vector<RawInterpretation> rule_extract(std::string_view text, const FeatureVector& fv) {
  const bool has_contradiction = fv.test(MarkerCategory::adversative) ||
                                 fv.test(MarkerCategory::contrastive) ||
                                 fv.test(MarkerCategory::concessive);
  if (has_contradiction) {
    const auto segments = segment_at_markers(text, fv.hits);
    std::vector<RawInterpretation> out;
    if (segments.empty()) return out;
    const double confidence = 1.0 / static_cast<double>(segments.size());
    out.reserve(segments.size());
    for (const auto& s : segments) {
      out.push_back({s.text, s.context_label, confidence, Source::rule});
    }
    return out;
  }
  if (fv.test(MarkerCategory::hedging)) return hedge_variants(text, fv.hits);
  return {};
}

}  // namespace textstate
