#pragma once

#include "textstate/embedding.hpp"
#include "textstate/rule_extract.hpp"

namespace textstate {

struct MergePolicy {
  /// Deduplication threshold: a candidate survives only if its cosine
  /// similarity to every retained item is strictly below tau.
  double tau = 0.85;
  /// Also drop a candidate that duplicates an earlier surviving candidate
  /// from the same list. The plain set formula only filters against the
  /// first list; without this, repeated enumerations inflate the state.
  bool dedup_within_llm = true;
};

/// Merge(I1, I2) = I1 ∪ {i ∈ I2 | ∀j ∈ I1: sim(i, j) < tau}.
///
/// Everything in `rule_list` is retained, in order. Surviving `llm_list`
/// items follow in their original order. Similarity is computed over
/// embeddings of the meaning strings only.
std::vector<RawInterpretation> merge(const std::vector<RawInterpretation>& rule_list,
                                     const std::vector<RawInterpretation>& llm_list,
                                     const MergePolicy& policy, const Embedder& embedder);

}  // namespace textstate
