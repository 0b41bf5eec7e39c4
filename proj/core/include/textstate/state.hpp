#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "textstate/embedding.hpp"
#include "textstate/lexicon.hpp"
#include "textstate/rule_extract.hpp"

namespace textstate {

/// Interns a context label into the process-wide context namespace and
/// returns its stable id. Thread-safe.
int intern_context(std::string_view label);

struct StateEntryMeta {
  Source source = Source::rule;
  FeatureVector conflict;  // the feature vector the interpretation came from
  bool collapsed_fallback = false;
};

/// One interpretation held in a state: embedding, context, unnormalized
/// activation weight, metadata.
struct StateEntry {
  std::string meaning;
  EmbeddingVector v;
  std::string context;
  int context_id = 0;
  double weight = 1.0;  // > 0, stored unnormalized
  StateEntryMeta meta;
};

/// A non-collapsing set of coexisting interpretations of one text. Weights
/// stay unnormalized; normalization happens only inside entropy computation.
struct State {
  std::string source_text;
  std::vector<StateEntry> entries;
  std::vector<std::string> warnings;  // degradations recorded during mapping

  std::size_t size() const { return entries.size(); }
};

/// Stage 3. One entry per interpretation with
///   w = confidence * (1 + beta * [any marker detected]).
/// Zero-confidence interpretations are dropped (and noted in warnings).
/// If no interpretation was extracted, the state holds the whole text as a
/// single "literal" entry at weight 1, flagged as the collapsed fallback.
State construct_state(std::string_view text, const std::vector<RawInterpretation>& interps,
                      const FeatureVector& fv, double beta, const Embedder& embedder);

/// Shannon entropy (bits) of the normalized weight distribution:
/// H = -sum p_i log2 p_i with p_i = w_i / sum w_j. Zero for |S| <= 1.
/// Throws InvariantError if any weight is non-positive.
double state_entropy(const State& s);

/// Entropy preservation ratio H / log2|S|, in [0, 1]. Defined as 0 for
/// |S| = 1 (H_max is 0 there, so the ratio is taken as zero).
double epr(const State& s);

struct NonCollapse {
  bool ok = false;
  std::string reason;  // empty on pass

  explicit operator bool() const { return ok; }
};

/// Structural and entropy non-collapse: |S| >= 2 and H > 0.
NonCollapse check_noncollapse(const State& s);

/// The forced-collapse baseline: keeps only the highest-weight entry
/// (lowest index on ties). Its entropy is 0 by construction.
State collapsed(const State& s);

struct StateMetrics {
  std::size_t size = 0;
  double entropy_bits = 0.0;
  double epr = 0.0;
};

StateMetrics compute_metrics(const State& s);

/// Serializes {source_text, entries, metrics} to JSON. Embedding vectors are
/// bulky and only included on request.
std::string state_to_json(const State& s, bool emit_embeddings = false, int indent = 2);

/// Serializes a feature vector: bits in canonical category order, the set
/// category names, and the hit list with byte spans.
std::string feature_vector_to_json(const FeatureVector& fv, int indent = 2);

}  // namespace textstate
