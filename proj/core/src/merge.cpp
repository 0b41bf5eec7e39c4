#include "textstate/merge.hpp"

#include "textstate/errors.hpp"

namespace textstate {

std::vector<RawInterpretation> merge(const std::vector<RawInterpretation>& rule_list,
                                     const std::vector<RawInterpretation>& llm_list,
                                     const MergePolicy& policy, const Embedder& embedder) {
  if (!(policy.tau > 0.0 && policy.tau < 1.0))
    throw ValidationError("merge tau must lie in (0, 1)");

  std::vector<RawInterpretation> out = rule_list;
  if (llm_list.empty()) return out;

  std::vector<EmbeddingVector> kept;
  kept.reserve(out.size() + llm_list.size());
  for (const auto& r : out) kept.push_back(embedder.embed(r.meaning));
  const std::size_t rule_count = kept.size();

  for (const auto& candidate : llm_list) {
    const EmbeddingVector v = embedder.embed(candidate.meaning);
    bool survives = true;
    const std::size_t compare_against = policy.dedup_within_llm ? kept.size() : rule_count;
    for (std::size_t j = 0; j < compare_against && survives; ++j) {
      if (cosine_sim(v, kept[j]) >= policy.tau) survives = false;
    }
    if (survives) {
      out.push_back(candidate);
      kept.push_back(v);
    }
  }
  return out;
}

}  // namespace textstate
