#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "textstate/corpus.hpp"
#include "textstate/lexicon.hpp"
#include "textstate/rule_extract.hpp"

namespace textstate {

/// The interpretation-enumeration prompt for one input text.
struct InterpPrompt {
  std::string text;
  bool conflict_note_included = false;  // true iff ||f||_1 > 0
  std::string rendered;
};

/// Renders the enumeration prompt. The template is fixed; only the text
/// substitution and the presence of the ambiguity-note line vary.
InterpPrompt build_prompt(std::string_view text, const FeatureVector& fv);

/// Parses a model response into interpretations. Accepts the structured JSON
/// shape ({"interpretations": [{meaning, context, confidence}, ...]}) first,
/// then falls back to the INTERP:/CONTEXT:/CONFIDENCE: line format with "---"
/// separators. Confidences are clamped into [0, 1]; blocks without one
/// default to 1/n. Source is set to llm.
///
/// Throws MalformedResponseError (carrying the raw text) when nothing
/// parseable is found.
std::vector<RawInterpretation> parse_llm_response(std::string_view raw);

struct ProviderConfig {
  std::string endpoint;  // chat-completions style URL
  std::string model_id;
  std::string auth_env;  // env var naming the bearer secret; value never logged or stored
  std::chrono::milliseconds timeout{30000};
  int max_concurrency = 4;
  std::string provider_label = "chatgpt";
  int max_retries = 3;
  int retry_base_ms = 250;
};

ProviderConfig provider_config_from_json(std::string_view content);

/// One recorded model exchange, replayable deterministically.
struct Fixture {
  std::string sentence_id;
  std::string provider_label;
  std::string text;  // optional; enables replay keyed by exact text
  std::string raw_response;
  std::vector<RawInterpretation> parsed;  // always parse_llm_response(raw_response)
};

std::string fixture_to_json(const Fixture& f);
Fixture fixture_from_json(std::string_view content);  // re-derives and checks `parsed`

/// A set of fixtures, usually one directory of <sentence_id>__<provider>.json
/// files. Read-only after loading; safe to share across threads.
class FixtureStore {
 public:
  FixtureStore() = default;

  static FixtureStore load_dir(const std::filesystem::path& dir);

  void add(Fixture f);

  /// Lookup by (provider, sentence_id), falling back to (provider, exact
  /// text). Returns nullptr if absent.
  const Fixture* find(std::string_view provider_label, std::string_view sentence_id,
                      std::string_view text) const;

  std::size_t size() const { return fixtures_.size(); }
  bool empty() const { return fixtures_.empty(); }
  const std::vector<Fixture>& fixtures() const { return fixtures_; }
  std::vector<std::string> provider_labels() const;

  /// Writes one fixture into `dir` as <sentence_id>__<provider>.json,
  /// overwriting any previous recording for that key.
  static std::filesystem::path write_fixture(const std::filesystem::path& dir, const Fixture& f);

 private:
  std::vector<Fixture> fixtures_;
};

enum class ExtractionMode { live, replay };

struct LlmExtractOptions {
  ExtractionMode mode = ExtractionMode::replay;
  const ProviderConfig* provider = nullptr;  // required in live mode
  const FixtureStore* fixtures = nullptr;    // required in replay mode
  std::string provider_label = "chatgpt";
  std::string sentence_id;  // replay key hint; exact text is the fallback key
};

/// Stage 2b. Live mode prompts the configured provider; replay mode returns
/// the recorded fixture's interpretations bit-for-bit.
std::vector<RawInterpretation> llm_extract(std::string_view text, const FeatureVector& fv,
                                           const LlmExtractOptions& opts);

struct RecordFailure {
  std::string sentence_id;
  std::string error;
};

struct RecordOutcome {
  int written = 0;
  std::vector<RecordFailure> failures;
};

/// Runs live extraction over the given sentences and writes one fixture per
/// sentence into `out_dir`. Failures are reported per sentence; successful
/// recordings are kept. Requests run concurrently up to
/// provider.max_concurrency.
RecordOutcome record_fixtures(const std::vector<CorpusSentence>& sentences,
                              const ProviderConfig& provider,
                              const std::filesystem::path& out_dir,
                              const MarkerLexicon& lexicon = MarkerLexicon::builtin());

}  // namespace textstate
