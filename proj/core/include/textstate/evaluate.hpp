#pragma once

#include <string>
#include <vector>

#include "textstate/corpus.hpp"
#include "textstate/pipeline.hpp"
#include "textstate/state.hpp"

namespace textstate {

struct CategoryRow {
  std::string category;
  int n = 0;
  double mean_size = 0.0;
  double mean_entropy = 0.0;
  double mean_epr = 0.0;
  std::string method;
};

struct SentenceResult {
  std::string id;
  AmbiguityCategory category = AmbiguityCategory::adversative;
  StateMetrics metrics;
  bool conflict_detected = false;
  double baseline_entropy = 0.0;  // entropy after forced collapse; 0 by construction
  std::vector<std::string> warnings;  // degradations recorded on the state
  std::string error;                  // non-empty if the sentence could not be evaluated
  bool missing_fixture = false;
};

struct MetricsReport {
  std::vector<CategoryRow> rows;  // canonical category order
  CategoryRow overall;
  /// Fraction of sentences with at least one detected marker, per rule-based
  /// category (adversative, hedging).
  std::vector<std::pair<std::string, double>> conflict_detection_rate;
  /// Mean entropy of the forced-collapse baseline over all evaluated
  /// sentences. Always 0; computed, not assumed.
  double baseline_entropy = 0.0;
  std::vector<std::string> missing_fixtures;  // sentence ids
  std::vector<std::string> warnings;
  std::vector<SentenceResult> sentences;
};

/// Runs phi over every corpus sentence and aggregates per-category means.
///
/// In hybrid mode each sentence follows its expected_method: rule-based
/// categories take the pure rule path, the rest run hybrid extraction. The
/// sentence's own language selects the detection filter. Sentences that fail
/// (e.g. missing fixture in llm mode) are reported, never silently skipped.
/// Deterministic in replay mode regardless of `jobs`.
MetricsReport evaluate(const std::vector<CorpusSentence>& corpus, const PhiConfig& config,
                       int jobs = 0);

enum class ReportFormat { text, json, csv };

ReportFormat report_format_from_string(std::string_view name);

/// Renders the report. The text table mirrors the combined-results layout
/// (Category, N, |S|, H(S), Method); json and csv carry the same numbers at
/// full precision.
std::string emit_report(const MetricsReport& report, ReportFormat format);

/// Per-provider evaluation across several fixture sets plus the
/// cross-provider mean of each category metric.
struct MultiProviderReport {
  std::vector<std::string> providers;
  struct Row {
    std::string category;
    int n = 0;
    std::vector<double> mean_size;     // one per provider
    std::vector<double> mean_entropy;  // one per provider
    double cross_mean_size = 0.0;
    double cross_mean_entropy = 0.0;
  };
  std::vector<Row> rows;
  std::vector<MetricsReport> per_provider;
};

MultiProviderReport evaluate_providers(const std::vector<CorpusSentence>& corpus,
                                       const PhiConfig& config,
                                       const std::vector<std::string>& providers, int jobs = 0);

std::string emit_report(const MultiProviderReport& report, ReportFormat format);

}  // namespace textstate
