#include "textstate/state.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "text_norm.hpp"
#include "textstate/errors.hpp"

namespace textstate {

using json = nlohmann::ordered_json;

int intern_context(std::string_view label) {
  static std::mutex mu;
  static std::unordered_map<std::string, int> ids;
  std::lock_guard lock(mu);
  auto [it, inserted] = ids.try_emplace(std::string(label), static_cast<int>(ids.size()));
  return it->second;
}

State construct_state(std::string_view text, const std::vector<RawInterpretation>& interps,
                      const FeatureVector& fv, double beta, const Embedder& embedder) {
  if (!std::isfinite(beta) || beta < 0.0) throw ValidationError("beta must be finite and >= 0");

  State s;
  s.source_text = std::string(text);

  const double boost = 1.0 + (fv.has_conflict() ? beta : 0.0);
  for (const auto& interp : interps) {
    if (!(interp.confidence > 0.0)) {
      s.warnings.push_back("dropped zero-confidence interpretation: " + interp.meaning);
      continue;
    }
    StateEntry e;
    e.meaning = interp.meaning;
    e.v = embedder.embed(interp.meaning);
    e.context = interp.context_label;
    e.context_id = intern_context(interp.context_label);
    e.weight = interp.confidence * boost;
    e.meta.source = interp.source;
    e.meta.conflict = fv;
    s.entries.push_back(std::move(e));
  }

  if (s.entries.empty()) {
    // Keep the mapping total: unambiguous input becomes a single literal
    // entry, making the baseline H = 0 measurable.
    StateEntry e;
    e.meaning = std::string(detail::trim_ws(text));
    e.v = embedder.embed(e.meaning);
    e.context = "literal";
    e.context_id = intern_context(e.context);
    e.weight = 1.0;
    e.meta.source = Source::rule;
    e.meta.conflict = fv;
    e.meta.collapsed_fallback = true;
    s.entries.push_back(std::move(e));
  }
  return s;
}

double state_entropy(const State& s) {
  if (s.entries.empty()) return 0.0;
  double total = 0.0;
  for (const auto& e : s.entries) {
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw InvariantError("state entropy requires strictly positive weights");
    total += e.weight;
  }
  double h = 0.0;
  for (const auto& e : s.entries) {
    const double p = e.weight / total;
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;  // fold -0.0
}

double epr(const State& s) {
  if (s.size() <= 1) return 0.0;
  return state_entropy(s) / std::log2(static_cast<double>(s.size()));
}

NonCollapse check_noncollapse(const State& s) {
  if (s.size() < 2)
    return {false, "structural: |S| = " + std::to_string(s.size()) + " < 2"};
  if (!(state_entropy(s) > 0.0)) return {false, "entropy: H(S) = 0"};
  return {true, ""};
}

State collapsed(const State& s) {
  State out;
  out.source_text = s.source_text;
  if (s.entries.empty()) return out;
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.entries.size(); ++i) {
    if (s.entries[i].weight > s.entries[best].weight) best = i;
  }
  out.entries.push_back(s.entries[best]);
  return out;
}

StateMetrics compute_metrics(const State& s) {
  return {s.size(), state_entropy(s), epr(s)};
}

namespace {

json bits_json(const FeatureVector& fv) {
  json bits = json::array();
  for (bool b : fv.bits) bits.push_back(b);
  return bits;
}

json categories_json(const FeatureVector& fv) {
  json cats = json::array();
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    if (fv.bits[i]) cats.push_back(std::string(to_string(static_cast<MarkerCategory>(i))));
  }
  return cats;
}

}  // namespace

std::string state_to_json(const State& s, bool emit_embeddings, int indent) {
  json doc;
  doc["source_text"] = s.source_text;
  doc["entries"] = json::array();
  for (const auto& e : s.entries) {
    json item;
    item["meaning"] = e.meaning;
    item["context"] = e.context;
    item["weight"] = e.weight;
    item["source"] = std::string(to_string(e.meta.source));
    item["conflict_bits"] = bits_json(e.meta.conflict);
    if (e.meta.collapsed_fallback) item["collapsed_fallback"] = true;
    if (emit_embeddings) item["embedding"] = e.v.components;
    doc["entries"].push_back(std::move(item));
  }
  const StateMetrics m = compute_metrics(s);
  doc["metrics"] = {{"size", m.size}, {"entropy_bits", m.entropy_bits}, {"epr", m.epr}};
  if (!s.warnings.empty()) doc["warnings"] = s.warnings;
  return doc.dump(indent) + "\n";
}

std::string feature_vector_to_json(const FeatureVector& fv, int indent) {
  json doc;
  doc["bits"] = bits_json(fv);
  doc["categories"] = categories_json(fv);
  doc["has_conflict"] = fv.has_conflict();
  doc["hits"] = json::array();
  for (const auto& h : fv.hits) {
    doc["hits"].push_back({{"surface", h.entry.surface},
                           {"language", std::string(to_string(h.entry.language))},
                           {"category", std::string(to_string(h.entry.category))},
                           {"begin", h.begin},
                           {"end", h.end}});
  }
  return doc.dump(indent) + "\n";
}

}  // namespace textstate
