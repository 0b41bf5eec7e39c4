#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "textstate/embedding.hpp"
#include "textstate/lexicon.hpp"
#include "textstate/llm_extract.hpp"
#include "textstate/merge.hpp"
#include "textstate/state.hpp"

namespace textstate {

/// Configuration for the full text-to-state mapping.
struct PhiConfig {
  enum class Mode { rule, llm, hybrid };

  Mode mode = Mode::hybrid;
  MergePolicy merge_policy{};
  double beta = 0.5;  // conflict boost; entropy is invariant to it
  LanguageFilter language = LanguageFilter::any;
  ExtractionMode extraction = ExtractionMode::replay;
  std::shared_ptr<const MarkerLexicon> lexicon;      // null = builtin
  std::shared_ptr<const FixtureStore> fixtures;      // replay source
  std::shared_ptr<const ProviderConfig> provider;    // live source
  std::string provider_label = "chatgpt";
  std::shared_ptr<const Embedder> embedder;          // null = hashed-bag fallback
  double lambda = 0.0;  // dampening parameter, forwarded to the delta stage
};

PhiConfig::Mode phi_mode_from_string(std::string_view name);
std::string_view to_string(PhiConfig::Mode m);

/// The composed mapping: detect -> extract (rule and/or LLM, per mode) ->
/// merge -> construct. In hybrid replay mode a missing fixture degrades to
/// the rule path with a warning recorded on the state; in llm mode it is an
/// error. `sentence_id`, when given, keys fixture lookup.
State phi(std::string_view text, const PhiConfig& config, std::string_view sentence_id = {});

/// Named extension points of the state-processing pipeline. Semantics beyond
/// the defaults live outside this library; the stages here keep the pipeline
/// shape executable.
enum class StageKind { sigma, alpha, rho, iota, delta, tau, kappa, pi };

std::string_view to_string(StageKind k);

struct StageEnv {
  const State* prev_state = nullptr;  // provided to the kappa stage
  double lambda = 0.0;
};

struct OperatorStage {
  StageKind kind = StageKind::sigma;
  /// Empty function = default behaviour: identity for every stage except
  /// kappa, which concatenates the previous state's entries onto the
  /// current one (conflict tags retained).
  std::function<State(const State&, const StageEnv&)> transform;
};

/// The canonical stage list: sigma, rho, delta, kappa, pi with defaults.
std::vector<OperatorStage> default_stages();

struct PipelineResult {
  State state;
  std::string projection;
};

/// Runs phi, applies the stages in order (validated to be an ordered subset
/// of sigma..pi), then emits a non-destructive projection. Stage outputs are
/// checked against the state invariants; a violation raises
/// StageContractError naming the stage.
PipelineResult nrr_pipeline(std::string_view text, const State* prev_state,
                            const PhiConfig& config,
                            const std::vector<OperatorStage>& stages = default_stages());

/// Non-destructive projection: the meaning of the highest-weight entry
/// (lowest index wins ties). Never modifies the state.
std::string project(const State& s);

}  // namespace textstate
