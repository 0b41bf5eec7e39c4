#include "textstate/pipeline.hpp"

#include <cmath>

#include "text_norm.hpp"
#include "textstate/errors.hpp"
#include "textstate/rule_extract.hpp"

namespace textstate {

PhiConfig::Mode phi_mode_from_string(std::string_view name) {
  if (name == "rule") return PhiConfig::Mode::rule;
  if (name == "llm") return PhiConfig::Mode::llm;
  if (name == "hybrid") return PhiConfig::Mode::hybrid;
  throw ValidationError("unknown mode: '" + std::string(name) + "'");
}

std::string_view to_string(PhiConfig::Mode m) {
  switch (m) {
    case PhiConfig::Mode::rule: return "rule";
    case PhiConfig::Mode::llm: return "llm";
    default: return "hybrid";
  }
}

namespace {

const Embedder& resolve_embedder(const PhiConfig& config) {
  static const HashedBagEmbedder fallback;
  return config.embedder ? *config.embedder : static_cast<const Embedder&>(fallback);
}

const MarkerLexicon& resolve_lexicon(const PhiConfig& config) {
  return config.lexicon ? *config.lexicon : MarkerLexicon::builtin();
}

}  // namespace

State phi(std::string_view text, const PhiConfig& config, std::string_view sentence_id) {
  if (detail::trim_ws(text).empty()) throw EmptyInputError();
  const Embedder& embedder = resolve_embedder(config);
  const FeatureVector fv = detect_conflict_markers(text, resolve_lexicon(config), config.language);

  std::vector<RawInterpretation> rule_list;
  if (config.mode != PhiConfig::Mode::llm) rule_list = rule_extract(text, fv);

  std::vector<RawInterpretation> llm_list;
  std::string degraded;
  if (config.mode != PhiConfig::Mode::rule) {
    LlmExtractOptions opts;
    opts.mode = config.extraction;
    opts.provider = config.provider.get();
    opts.fixtures = config.fixtures.get();
    opts.provider_label = config.provider_label;
    opts.sentence_id = std::string(sentence_id);
    try {
      llm_list = llm_extract(text, fv, opts);
    } catch (const FixtureNotFoundError& e) {
      if (config.mode != PhiConfig::Mode::hybrid) throw;
      degraded = std::string("llm extraction degraded to rule-only: ") + e.what();
    }
  }

  std::vector<RawInterpretation> merged;
  if (config.mode == PhiConfig::Mode::rule) {
    merged = std::move(rule_list);
  } else {
    merged = merge(rule_list, llm_list, config.merge_policy, embedder);
  }

  State s = construct_state(text, merged, fv, config.beta, embedder);
  if (!degraded.empty()) s.warnings.push_back(std::move(degraded));
  return s;
}

namespace {

constexpr std::string_view kStageNames[] = {"sigma", "alpha", "rho", "iota",
                                            "delta", "tau",   "kappa", "pi"};

void validate_stage_list(const std::vector<OperatorStage>& stages) {
  int prev_rank = -1;
  for (const auto& stage : stages) {
    const int rank = static_cast<int>(stage.kind);
    if (rank <= prev_rank)
      throw ValidationError("stage list must be an ordered subset of sigma..pi without repeats");
    prev_rank = rank;
  }
}

void check_stage_output(const State& s, StageKind kind) {
  const auto fail = [&](const std::string& what) {
    throw StageContractError(std::string(to_string(kind)), what);
  };
  if (s.entries.empty()) fail("state has no entries");
  for (const auto& e : s.entries) {
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) fail("entry weight must be positive");
    if (e.context.empty()) fail("entry context must be non-empty");
    if (e.meaning.empty()) fail("entry meaning must be non-empty");
  }
}

State default_kappa(const State& current, const StageEnv& env) {
  if (env.prev_state == nullptr) return current;
  State out = current;
  out.entries.insert(out.entries.end(), env.prev_state->entries.begin(),
                     env.prev_state->entries.end());
  return out;
}

}  // namespace

std::string_view to_string(StageKind k) { return kStageNames[static_cast<int>(k)]; }

std::vector<OperatorStage> default_stages() {
  return {{StageKind::sigma, nullptr},
          {StageKind::rho, nullptr},
          {StageKind::delta, nullptr},
          {StageKind::kappa, nullptr},
          {StageKind::pi, nullptr}};
}

std::string project(const State& s) {
  if (s.entries.empty()) throw InvariantError("cannot project an empty state");
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.entries.size(); ++i) {
    if (s.entries[i].weight > s.entries[best].weight) best = i;
  }
  return s.entries[best].meaning;
}

PipelineResult nrr_pipeline(std::string_view text, const State* prev_state,
                            const PhiConfig& config, const std::vector<OperatorStage>& stages) {
  validate_stage_list(stages);
  StageEnv env{prev_state, config.lambda};

  State s = phi(text, config);
  for (const auto& stage : stages) {
    if (stage.transform) {
      s = stage.transform(s, env);
    } else if (stage.kind == StageKind::kappa) {
      s = default_kappa(s, env);
    }  // other defaults are the identity
    check_stage_output(s, stage.kind);
  }
  std::string projection = project(s);
  return {std::move(s), std::move(projection)};
}

}  // namespace textstate
