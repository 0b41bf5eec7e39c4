#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "textstate/embedding.hpp"
#include "textstate/lexicon.hpp"
#include "textstate/llm_extract.hpp"
#include "textstate/merge.hpp"
#include "textstate/pipeline.hpp"
#include "textstate/rule_extract.hpp"
#include "textstate/state.hpp"

using namespace textstate;

namespace {

std::string make_text(int clauses) {
  std::string text = "the water rises in the harbor";
  for (int i = 1; i < clauses; ++i) {
    text += (i % 2 == 0) ? " but the walls were built for this"
                         : " and the ferries keep their schedule";
  }
  return text;
}

void BM_DetectMarkers(benchmark::State& state) {
  const auto& lexicon = MarkerLexicon::builtin();
  const std::string text = make_text(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect_conflict_markers(text, lexicon));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_DetectMarkers)->Arg(2)->Arg(8)->Arg(32);

void BM_SegmentAtMarkers(benchmark::State& state) {
  const auto& lexicon = MarkerLexicon::builtin();
  const std::string text = make_text(static_cast<int>(state.range(0)));
  const auto fv = detect_conflict_markers(text, lexicon);
  for (auto _ : state) {
    benchmark::DoNotOptimize(segment_at_markers(text, fv.hits));
  }
}
BENCHMARK(BM_SegmentAtMarkers)->Arg(8)->Arg(32);

void BM_HashedEmbed(benchmark::State& state) {
  const HashedBagEmbedder embedder;
  const std::string text = make_text(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(embedder.embed(text));
  }
}
BENCHMARK(BM_HashedEmbed)->Arg(2)->Arg(32);

void BM_Merge(benchmark::State& state) {
  const HashedBagEmbedder embedder;
  const MergePolicy policy;
  std::vector<RawInterpretation> rule, llm;
  for (int i = 0; i < state.range(0); ++i) {
    rule.push_back({"rule reading number " + std::to_string(i), "ctx", 0.5, Source::rule});
    llm.push_back({"model reading number " + std::to_string(i), "ctx", 0.5, Source::llm});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(merge(rule, llm, policy, embedder));
  }
}
BENCHMARK(BM_Merge)->Arg(2)->Arg(5)->Arg(10);

void BM_StateEntropy(benchmark::State& state) {
  const HashedBagEmbedder embedder;
  State s;
  s.source_text = "bench";
  for (int i = 0; i < state.range(0); ++i) {
    StateEntry e;
    e.meaning = "reading " + std::to_string(i);
    e.v = embedder.embed(e.meaning);
    e.context = "ctx";
    e.weight = 0.25 + 0.1 * i;
    s.entries.push_back(std::move(e));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(state_entropy(s));
  }
}
BENCHMARK(BM_StateEntropy)->Arg(2)->Arg(10);

void BM_PhiRuleMode(benchmark::State& state) {
  PhiConfig config;
  config.mode = PhiConfig::Mode::rule;
  const std::string text = "I want to quit my job, but I also don't want to quit.";
  for (auto _ : state) {
    benchmark::DoNotOptimize(phi(text, config));
  }
}
BENCHMARK(BM_PhiRuleMode);

void BM_PhiHybridReplay(benchmark::State& state) {
  auto fixtures = std::make_shared<FixtureStore>();
  Fixture f;
  f.sentence_id = "bench_01";
  f.provider_label = "chatgpt";
  f.text = "I saw her duck.";
  f.raw_response =
      R"({"interpretations": [{"meaning": "the bird reading", "confidence": 0.5},
                              {"meaning": "the dodge reading", "confidence": 0.5}]})";
  f.parsed = parse_llm_response(f.raw_response);
  fixtures->add(f);

  PhiConfig config;
  config.fixtures = fixtures;
  for (auto _ : state) {
    benchmark::DoNotOptimize(phi("I saw her duck.", config, "bench_01"));
  }
}
BENCHMARK(BM_PhiHybridReplay);

}  // namespace

BENCHMARK_MAIN();
