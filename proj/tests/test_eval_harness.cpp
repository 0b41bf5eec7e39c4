#include <doctest.h>

#include <map>
#include <memory>

#include <nlohmann/json.hpp>

#include "textstate/corpus.hpp"
#include "textstate/errors.hpp"
#include "textstate/evaluate.hpp"

using namespace textstate;

#ifndef TEXTSTATE_TEST_DATA_DIR
#error "TEXTSTATE_TEST_DATA_DIR must point at core/data"
#endif

namespace {

const std::string kDataDir = TEXTSTATE_TEST_DATA_DIR;

std::vector<CorpusSentence> bundled_corpus() { return load_corpus(kDataDir + "/corpus.jsonl"); }

std::shared_ptr<FixtureStore> bundled_fixtures() {
  return std::make_shared<FixtureStore>(FixtureStore::load_dir(kDataDir + "/fixtures"));
}

std::vector<CorpusSentence> by_category(const std::vector<CorpusSentence>& corpus,
                                        AmbiguityCategory cat) {
  std::vector<CorpusSentence> out;
  for (const auto& s : corpus) {
    if (s.category == cat) out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("bundled corpus composition") {
  const auto corpus = bundled_corpus();
  REQUIRE(corpus.size() == 68);

  std::map<std::string, int> counts;
  std::map<std::string, int> jp_counts;
  for (const auto& s : corpus) {
    counts[std::string(to_string(s.category))]++;
    if (s.language == Language::jp) jp_counts[std::string(to_string(s.category))]++;
  }
  CHECK(counts["adversative"] == 20);
  CHECK(counts["hedging"] == 20);
  CHECK(counts["epistemic"] == 8);
  CHECK(counts["lexical"] == 10);
  CHECK(counts["structural"] == 10);
  CHECK(jp_counts["adversative"] == 10);
  CHECK(jp_counts["hedging"] == 10);
  CHECK(jp_counts.size() == 2);  // Japanese only in the rule-based categories

  for (const auto& s : corpus) {
    const bool rule_cat =
        s.category == AmbiguityCategory::adversative || s.category == AmbiguityCategory::hedging;
    CHECK(s.expected_method == (rule_cat ? ExtractionMethod::rule : ExtractionMethod::llm));
  }
}

TEST_CASE("corpus schema validation") {
  SUBCASE("missing category carries the line number") {
    const std::string two_lines =
        R"({"id": "a", "text": "one", "language": "en", "category": "lexical", "expected_method": "llm"})"
        "\n"
        R"({"id": "b", "text": "two", "language": "en", "expected_method": "llm"})";
    try {
      parse_corpus(two_lines);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("duplicate ids are rejected") {
    const std::string dup =
        R"({"id": "a", "text": "one", "language": "en", "category": "lexical", "expected_method": "llm"})"
        "\n"
        R"({"id": "a", "text": "two", "language": "en", "category": "lexical", "expected_method": "llm"})";
    CHECK_THROWS_AS(parse_corpus(dup), ValidationError);
  }
  SUBCASE("japanese outside the rule-based categories is rejected") {
    CHECK_THROWS_AS(
        parse_corpus(
            R"({"id": "a", "text": "x y", "language": "jp", "category": "lexical", "expected_method": "llm"})"),
        ParseError);
  }
  SUBCASE("broken json carries the line number") {
    try {
      parse_corpus("{\"id\": \"a\"");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
    }
  }
  SUBCASE("unknown enum values are schema errors") {
    CHECK_THROWS_AS(
        parse_corpus(
            R"({"id": "a", "text": "x y", "language": "en", "category": "weird", "expected_method": "llm"})"),
        ParseError);
  }
  SUBCASE("blank lines are skipped") {
    const auto out = parse_corpus(
        "\n"
        R"({"id": "a", "text": "x y", "language": "en", "category": "lexical", "expected_method": "llm"})"
        "\n\n");
    CHECK(out.size() == 1);
  }
}

TEST_CASE("rule-mode evaluation zero rows") {
  const auto corpus = bundled_corpus();
  PhiConfig config;
  config.mode = PhiConfig::Mode::rule;

  for (auto cat : {AmbiguityCategory::epistemic, AmbiguityCategory::lexical,
                   AmbiguityCategory::structural}) {
    const auto subset = by_category(corpus, cat);
    const MetricsReport report = evaluate(subset, config, 1);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].mean_size == 1.0);
    CHECK(report.rows[0].mean_entropy == 0.0);
    CHECK(report.rows[0].mean_epr == 0.0);
  }
}

TEST_CASE("rule-path exactness per sentence") {
  const auto corpus = bundled_corpus();
  PhiConfig config;
  config.mode = PhiConfig::Mode::rule;
  const MetricsReport report = evaluate(corpus, config, 1);

  int exact_binary = 0;
  for (const auto& r : report.sentences) {
    if (r.category != AmbiguityCategory::adversative &&
        r.category != AmbiguityCategory::hedging)
      continue;
    CHECK(r.error.empty());
    CHECK(r.conflict_detected);
    if (r.metrics.size == 2) {
      CHECK(r.metrics.entropy_bits == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(r.metrics.epr == doctest::Approx(1.0).epsilon(1e-9));
      ++exact_binary;
    }
  }
  CHECK(exact_binary == 38);  // all rule sentences except the two triple-clause ones
}

TEST_CASE("hybrid evaluation over the bundled corpus") {
  const auto corpus = bundled_corpus();
  PhiConfig config;
  config.fixtures = bundled_fixtures();

  const MetricsReport report = evaluate(corpus, config);
  REQUIRE(report.rows.size() == 5);
  for (const auto& row : report.rows) {
    CHECK(row.mean_entropy > 0.0);
    CHECK(row.mean_size >= 2.0);
  }
  CHECK(report.overall.n == 68);
  CHECK(report.missing_fixtures.empty());
  CHECK(report.warnings.empty());
  CHECK(report.baseline_entropy == 0.0);

  for (const auto& [cat, rate] : report.conflict_detection_rate) {
    CHECK(rate == 1.0);
  }
  REQUIRE(report.conflict_detection_rate.size() == 2);
}

TEST_CASE("missing fixtures are reported, not skipped") {
  const auto corpus = by_category(bundled_corpus(), AmbiguityCategory::lexical);
  PhiConfig config;
  config.mode = PhiConfig::Mode::llm;
  config.fixtures = std::make_shared<FixtureStore>();  // empty on purpose

  const MetricsReport report = evaluate(corpus, config, 2);
  CHECK(report.missing_fixtures.size() == corpus.size());
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].n == 0);
  for (const auto& r : report.sentences) {
    CHECK(r.missing_fixture);
    CHECK(!r.error.empty());
  }
}

TEST_CASE("empty corpus gives an empty report") {
  PhiConfig config;
  const MetricsReport report = evaluate({}, config);
  CHECK(report.rows.empty());
  CHECK(report.overall.n == 0);
  CHECK(report.sentences.empty());
}

TEST_CASE("replay evaluation is bit-identical") {
  const auto corpus = bundled_corpus();
  PhiConfig config;
  config.fixtures = bundled_fixtures();

  const std::string a = emit_report(evaluate(corpus, config, 1), ReportFormat::json);
  const std::string b = emit_report(evaluate(corpus, config, 4), ReportFormat::json);
  CHECK(a == b);
}

TEST_CASE("report formats") {
  const auto corpus = by_category(bundled_corpus(), AmbiguityCategory::adversative);
  PhiConfig config;
  config.mode = PhiConfig::Mode::rule;
  const MetricsReport report = evaluate(corpus, config, 1);

  SUBCASE("text table mirrors the combined-results column order") {
    const std::string text = emit_report(report, ReportFormat::text);
    const auto header = text.substr(0, text.find('\n'));
    CHECK(header.find("Category") != std::string::npos);
    CHECK(header.find("N") > header.find("Category"));
    CHECK(header.find("|S|") > header.find("N"));
    CHECK(header.find("H(S)") > header.find("|S|"));
    CHECK(header.find("Method") > header.find("H(S)"));
    CHECK(text.find("conflict_detection_rate adversative 1.000") != std::string::npos);
    CHECK(text.find("baseline_entropy 0.000") != std::string::npos);
  }
  SUBCASE("json carries full precision") {
    const auto doc = nlohmann::json::parse(emit_report(report, ReportFormat::json));
    CHECK(doc["rows"][0]["category"] == "adversative");
    CHECK(doc["rows"][0]["n"] == 20);
    CHECK(doc["rows"][0]["mean_size"].get<double>() == report.rows[0].mean_size);
    CHECK(doc["rows"][0]["mean_entropy"].get<double>() == report.rows[0].mean_entropy);
    CHECK(doc["sentences"].size() == 20);
  }
  SUBCASE("csv has one row per category plus overall") {
    const std::string csv = emit_report(report, ReportFormat::csv);
    CHECK(csv.rfind("category,n,mean_size,mean_entropy,mean_epr,method\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + adversative + overall
  }
  SUBCASE("format names parse") {
    CHECK(report_format_from_string("table") == ReportFormat::text);
    CHECK(report_format_from_string("text") == ReportFormat::text);
    CHECK(report_format_from_string("json") == ReportFormat::json);
    CHECK(report_format_from_string("csv") == ReportFormat::csv);
    CHECK_THROWS_AS(report_format_from_string("xml"), ValidationError);
  }
}

TEST_CASE("cross-provider evaluation") {
  const auto corpus = by_category(bundled_corpus(), AmbiguityCategory::lexical);
  PhiConfig config;
  config.mode = PhiConfig::Mode::llm;
  config.fixtures = bundled_fixtures();

  const auto report =
      evaluate_providers(corpus, config, {"chatgpt", "gemini", "claude"}, 1);
  REQUIRE(report.providers.size() == 3);
  REQUIRE(report.rows.size() == 1);
  const auto& row = report.rows[0];
  REQUIRE(row.mean_size.size() == 3);
  CHECK(row.mean_size[0] == doctest::Approx(2.0));   // chatgpt
  CHECK(row.mean_size[1] == doctest::Approx(2.3));   // gemini
  CHECK(row.mean_size[2] == doctest::Approx(2.2));   // claude
  CHECK(row.cross_mean_size ==
        doctest::Approx((row.mean_size[0] + row.mean_size[1] + row.mean_size[2]) / 3));
  for (double h : row.mean_entropy) CHECK(h > 0.0);

  const std::string table = emit_report(report, ReportFormat::text);
  CHECK(table.find("chatgpt") != std::string::npos);
  CHECK(table.find("lexical |S|") != std::string::npos);
  CHECK(table.find("Mean") != std::string::npos);
}
