#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "textstate/errors.hpp"
#include "textstate/lexicon.hpp"
#include "textstate/state.hpp"

using namespace textstate;

namespace {

const HashedBagEmbedder& embedder() {
  static const HashedBagEmbedder e;
  return e;
}

FeatureVector conflict_fv() {
  return detect_conflict_markers("yes but no", MarkerLexicon::builtin());
}

FeatureVector plain_fv() {
  return detect_conflict_markers("plain words here", MarkerLexicon::builtin());
}

State make_state(const std::vector<double>& weights) {
  State s;
  s.source_text = "synthetic";
  for (std::size_t i = 0; i < weights.size(); ++i) {
    StateEntry e;
    e.meaning = "interp " + std::to_string(i);
    e.v = embedder().embed(e.meaning);
    e.context = "ctx";
    e.weight = weights[i];
    e.meta.conflict = plain_fv();
    s.entries.push_back(std::move(e));
  }
  return s;
}

}  // namespace

TEST_CASE("state construction") {
  SUBCASE("adversative segments with the conflict boost") {
    const std::vector<RawInterpretation> interps = {
        {"yametai", "pre-adv", 0.5, Source::rule},
        {"yametakunai", "post-adv", 0.5, Source::rule}};
    const State s = construct_state("Yametai kedo yametakunai", interps, conflict_fv(), 0.5,
                                    embedder());
    REQUIRE(s.size() == 2);
    CHECK(s.entries[0].weight == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(s.entries[1].weight == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(state_entropy(s) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.entries[0].meta.conflict.has_conflict());
  }
  SUBCASE("no conflict leaves confidences as weights") {
    const std::vector<RawInterpretation> interps = {
        {"pajamas on speaker", "PP attaches to subject", 0.7, Source::llm},
        {"pajamas on elephant", "PP attaches to object", 0.3, Source::llm}};
    const State s = construct_state("I shot an elephant in my pajamas.", interps, plain_fv(), 0.5,
                                    embedder());
    REQUIRE(s.size() == 2);
    CHECK(s.entries[0].weight == doctest::Approx(0.7));
    CHECK(s.entries[1].weight == doctest::Approx(0.3));
  }
  SUBCASE("single interpretation at weight one") {
    const std::vector<RawInterpretation> interps = {{"whole text", "literal", 1.0, Source::rule}};
    const State s = construct_state("whole text", interps, plain_fv(), 7.0, embedder());
    REQUIRE(s.size() == 1);
    CHECK(s.entries[0].weight == doctest::Approx(1.0));
  }
  SUBCASE("empty extraction produces the literal fallback") {
    const State s = construct_state("  The cat sat on the mat. ", {}, plain_fv(), 0.5, embedder());
    REQUIRE(s.size() == 1);
    CHECK(s.entries[0].meaning == "The cat sat on the mat.");
    CHECK(s.entries[0].context == "literal");
    CHECK(s.entries[0].weight == doctest::Approx(1.0));
    CHECK(s.entries[0].meta.collapsed_fallback);
    CHECK(state_entropy(s) == 0.0);
    CHECK(epr(s) == 0.0);
  }
  SUBCASE("zero-confidence interpretations are excluded and logged") {
    const std::vector<RawInterpretation> interps = {{"kept", "ctx", 0.8, Source::llm},
                                                    {"dropped", "ctx", 0.0, Source::llm}};
    const State s = construct_state("text", interps, plain_fv(), 0.5, embedder());
    REQUIRE(s.size() == 1);
    CHECK(s.entries[0].meaning == "kept");
    REQUIRE(s.warnings.size() == 1);
    CHECK(s.warnings[0].find("dropped") != std::string::npos);
  }
  SUBCASE("context labels are interned") {
    CHECK(intern_context("pre-adv") == intern_context("pre-adv"));
    CHECK(intern_context("pre-adv") != intern_context("post-adv"));
  }
  SUBCASE("invalid beta") {
    CHECK_THROWS_AS(construct_state("x y", {}, plain_fv(), -1.0, embedder()), ValidationError);
  }
}

TEST_CASE("entropy values") {
  CHECK(state_entropy(make_state({0.5, 0.5})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(state_entropy(make_state({0.7, 0.3})) == doctest::Approx(0.8812908992306927).epsilon(1e-12));
  CHECK(state_entropy(make_state({0.7, 0.3})) == doctest::Approx(0.881).epsilon(5e-4));
  const double third = 1.0 / 3.0;
  CHECK(state_entropy(make_state({third, third, third})) ==
        doctest::Approx(std::log2(3.0)).epsilon(1e-12));
  CHECK(state_entropy(make_state({1.0})) == 0.0);
  CHECK(std::signbit(state_entropy(make_state({1.0}))) == false);

  CHECK_THROWS_AS(state_entropy(make_state({0.5, 0.0})), InvariantError);
  CHECK_THROWS_AS(state_entropy(make_state({0.5, -0.1})), InvariantError);
}

TEST_CASE("entropy preservation ratio") {
  CHECK(epr(make_state({0.4, 0.4})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(epr(make_state({1.0})) == 0.0);
  const State skewed = make_state({0.7, 0.3});
  CHECK(epr(skewed) == doctest::Approx(state_entropy(skewed) / 1.0).epsilon(1e-12));
  const State three = make_state({0.5, 0.25, 0.25});
  CHECK(epr(three) == doctest::Approx(state_entropy(three) / std::log2(3.0)).epsilon(1e-12));
  CHECK(epr(three) < 1.0);
}

TEST_CASE("non-collapse check") {
  CHECK(check_noncollapse(make_state({0.5, 0.5})).ok);
  const auto single = check_noncollapse(make_state({1.0}));
  CHECK(!single.ok);
  CHECK(single.reason.find("structural") != std::string::npos);

  // extreme imbalance still counts: H is tiny but positive
  const State lopsided = make_state({1.0, 1e-12});
  const auto res = check_noncollapse(lopsided);
  CHECK(res.ok);
  const double h = state_entropy(lopsided);
  CHECK(h > 0.0);
  CHECK(h == doctest::Approx(oracle::entropy_bits({1.0, 1e-12})).epsilon(1e-9));
  CHECK(h < 1e-9);
}

TEST_CASE("entropy laws") {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> weight_dist(0.01, 10.0);

  SUBCASE("invariance under uniform scaling") {
    for (int trial = 0; trial < 200; ++trial) {
      const int n = std::uniform_int_distribution<int>(1, 10)(rng);
      std::vector<double> w(n);
      for (auto& x : w) x = weight_dist(rng);
      const State base = make_state(w);
      const double h = state_entropy(base);
      for (double lambda : {1e-6, 0.25, 3.0, 1e6}) {
        std::vector<double> scaled = w;
        for (auto& x : scaled) x *= lambda;
        CHECK(std::abs(state_entropy(make_state(scaled)) - h) <= 1e-12);
        CHECK(std::abs(epr(make_state(scaled)) - epr(base)) <= 1e-12);
      }
    }
  }
  SUBCASE("beta never changes entropy") {
    const std::vector<RawInterpretation> interps = {{"first reading", "a", 0.6, Source::rule},
                                                    {"second reading", "b", 0.4, Source::rule}};
    const double h0 = state_entropy(construct_state("x but y", interps, conflict_fv(), 0.0,
                                                    embedder()));
    for (double beta : {0.25, 0.5, 2.0, 50.0}) {
      const double h = state_entropy(construct_state("x but y", interps, conflict_fv(), beta,
                                                     embedder()));
      CHECK(std::abs(h - h0) <= 1e-12);
    }
  }
  SUBCASE("upper bound with equality only at uniform") {
    for (int trial = 0; trial < 200; ++trial) {
      const int n = std::uniform_int_distribution<int>(2, 10)(rng);
      std::vector<double> w(n);
      for (auto& x : w) x = weight_dist(rng);
      const double h = state_entropy(make_state(w));
      CHECK(h <= std::log2(static_cast<double>(n)) + 1e-12);

      // a controlled 0.1% imbalance must sit strictly below the bound
      std::vector<double> near_uniform(n, weight_dist(rng));
      near_uniform[0] *= 1.001;
      CHECK(state_entropy(make_state(near_uniform)) < std::log2(static_cast<double>(n)) - 1e-9);

      const std::vector<double> uniform(n, 0.7);
      CHECK(std::abs(state_entropy(make_state(uniform)) - std::log2(static_cast<double>(n))) <=
            1e-12);
    }
  }
  SUBCASE("agrees with the direct-definition oracle") {
    for (int trial = 0; trial < 200; ++trial) {
      const int n = std::uniform_int_distribution<int>(1, 8)(rng);
      std::vector<double> w(n);
      for (auto& x : w) x = weight_dist(rng);
      CHECK(state_entropy(make_state(w)) ==
            doctest::Approx(oracle::entropy_bits(w)).epsilon(1e-12));
    }
  }
  SUBCASE("permutation invariance") {
    std::vector<double> w = {0.1, 0.4, 0.2, 0.9, 1.3};
    const State s = make_state(w);
    const double h = state_entropy(s);
    const double e = epr(s);
    for (int i = 0; i < 10; ++i) {
      std::shuffle(w.begin(), w.end(), rng);
      const State p = make_state(w);
      CHECK(state_entropy(p) == doctest::Approx(h).epsilon(1e-12));
      CHECK(epr(p) == doctest::Approx(e).epsilon(1e-12));
      CHECK(p.size() == s.size());
    }
  }
}

TEST_CASE("forced collapse") {
  const State s = make_state({0.2, 0.9, 0.9, 0.1});
  const State c = collapsed(s);
  REQUIRE(c.size() == 1);
  CHECK(c.entries[0].meaning == "interp 1");  // first of the tied maxima
  CHECK(state_entropy(c) == 0.0);
  CHECK(!check_noncollapse(c).ok);
}

TEST_CASE("state json serialization") {
  const std::vector<RawInterpretation> interps = {{"reading a", "pre-adv", 0.5, Source::rule},
                                                  {"reading b", "post-adv", 0.5, Source::llm}};
  const State s = construct_state("a but b", interps, conflict_fv(), 0.5, embedder());

  const auto doc = nlohmann::json::parse(state_to_json(s));
  CHECK(doc["source_text"] == "a but b");
  REQUIRE(doc["entries"].size() == 2);
  CHECK(doc["entries"][0]["meaning"] == "reading a");
  CHECK(doc["entries"][0]["source"] == "rule");
  CHECK(doc["entries"][1]["source"] == "llm");
  CHECK(doc["entries"][0]["conflict_bits"].size() == kCategoryCount);
  CHECK(doc["entries"][0]["conflict_bits"][0] == true);
  CHECK(!doc["entries"][0].contains("embedding"));
  CHECK(doc["metrics"]["size"] == 2);
  CHECK(doc["metrics"]["entropy_bits"] == doctest::Approx(1.0));
  CHECK(doc["metrics"]["epr"] == doctest::Approx(1.0));

  const auto with_vectors = nlohmann::json::parse(state_to_json(s, true));
  CHECK(with_vectors["entries"][0]["embedding"].size() == kDefaultEmbeddingDim);

  const auto fv_doc = nlohmann::json::parse(feature_vector_to_json(conflict_fv()));
  CHECK(fv_doc["has_conflict"] == true);
  CHECK(fv_doc["categories"][0] == "adversative");
  CHECK(fv_doc["bits"].size() == kCategoryCount);
}
