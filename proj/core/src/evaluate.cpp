#include "textstate/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "textstate/errors.hpp"

namespace textstate {

using json = nlohmann::ordered_json;

namespace {

constexpr AmbiguityCategory kCategoryOrder[] = {
    AmbiguityCategory::adversative, AmbiguityCategory::hedging, AmbiguityCategory::epistemic,
    AmbiguityCategory::lexical, AmbiguityCategory::structural};

SentenceResult evaluate_one(const CorpusSentence& s, const PhiConfig& base) {
  SentenceResult r;
  r.id = s.id;
  r.category = s.category;

  PhiConfig config = base;
  config.language = s.language == Language::jp ? LanguageFilter::jp : LanguageFilter::en;
  if (base.mode == PhiConfig::Mode::hybrid && s.expected_method == ExtractionMethod::rule) {
    // Rule-based categories take the pure rule path; LLM enumeration is only
    // recorded for the implicit-ambiguity categories.
    config.mode = PhiConfig::Mode::rule;
  }

  const State state = phi(s.text, config, s.id);
  r.metrics = compute_metrics(state);
  r.conflict_detected = state.entries.front().meta.conflict.has_conflict();
  r.baseline_entropy = state_entropy(collapsed(state));
  r.warnings = state.warnings;
  return r;
}

std::string method_name(const std::vector<const CorpusSentence*>& sentences) {
  bool any_rule = false, any_llm = false;
  for (const auto* s : sentences) {
    (s->expected_method == ExtractionMethod::rule ? any_rule : any_llm) = true;
  }
  if (any_rule && any_llm) return "mixed";
  return any_llm ? "llm" : "rule";
}

int resolve_jobs(int jobs, std::size_t task_count) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs <= 0) jobs = 1;
  return static_cast<int>(std::min<std::size_t>(jobs, std::max<std::size_t>(task_count, 1)));
}

}  // namespace

MetricsReport evaluate(const std::vector<CorpusSentence>& corpus, const PhiConfig& config,
                       int jobs) {
  MetricsReport report;
  report.sentences.resize(corpus.size());

  const int workers = resolve_jobs(jobs, corpus.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= corpus.size()) return;
      try {
        report.sentences[i] = evaluate_one(corpus[i], config);
      } catch (const FixtureNotFoundError& e) {
        report.sentences[i].id = corpus[i].id;
        report.sentences[i].category = corpus[i].category;
        report.sentences[i].error = e.what();
        report.sentences[i].missing_fixture = true;
      } catch (const std::exception& e) {
        report.sentences[i].id = corpus[i].id;
        report.sentences[i].category = corpus[i].category;
        report.sentences[i].error = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  // Aggregation is sequential and ordered, so results do not depend on the
  // thread schedule.
  double total_size = 0.0, total_entropy = 0.0, total_epr = 0.0, total_baseline = 0.0;
  int total_n = 0;
  for (AmbiguityCategory cat : kCategoryOrder) {
    std::vector<const CorpusSentence*> members;
    double size_sum = 0.0, entropy_sum = 0.0, epr_sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (corpus[i].category != cat) continue;
      members.push_back(&corpus[i]);
      const auto& r = report.sentences[i];
      for (const auto& w : r.warnings) report.warnings.push_back(r.id + ": " + w);
      if (!r.error.empty()) {
        if (r.missing_fixture)
          report.missing_fixtures.push_back(r.id);
        else
          report.warnings.push_back(r.id + ": " + r.error);
        continue;
      }
      ++n;
      size_sum += static_cast<double>(r.metrics.size);
      entropy_sum += r.metrics.entropy_bits;
      epr_sum += r.metrics.epr;
      total_baseline += r.baseline_entropy;
    }
    if (members.empty()) continue;
    CategoryRow row;
    row.category = std::string(to_string(cat));
    row.n = n;
    row.mean_size = n > 0 ? size_sum / n : 0.0;
    row.mean_entropy = n > 0 ? entropy_sum / n : 0.0;
    row.mean_epr = n > 0 ? epr_sum / n : 0.0;
    row.method = method_name(members);
    report.rows.push_back(std::move(row));
    total_size += size_sum;
    total_entropy += entropy_sum;
    total_epr += epr_sum;
    total_n += n;

    if (cat == AmbiguityCategory::adversative || cat == AmbiguityCategory::hedging) {
      int detected = 0, evaluated = 0;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus[i].category != cat || !report.sentences[i].error.empty()) continue;
        ++evaluated;
        if (report.sentences[i].conflict_detected) ++detected;
      }
      report.conflict_detection_rate.emplace_back(
          std::string(to_string(cat)),
          evaluated > 0 ? static_cast<double>(detected) / evaluated : 0.0);
    }
  }

  report.overall.category = "overall";
  report.overall.n = total_n;
  report.overall.mean_size = total_n > 0 ? total_size / total_n : 0.0;
  report.overall.mean_entropy = total_n > 0 ? total_entropy / total_n : 0.0;
  report.overall.mean_epr = total_n > 0 ? total_epr / total_n : 0.0;
  report.overall.method = std::string(to_string(config.mode));
  report.baseline_entropy = total_n > 0 ? total_baseline / total_n : 0.0;

  std::sort(report.missing_fixtures.begin(), report.missing_fixtures.end());
  return report;
}

ReportFormat report_format_from_string(std::string_view name) {
  if (name == "text" || name == "table") return ReportFormat::text;
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  throw ValidationError("unknown report format: '" + std::string(name) + "'");
}

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

json row_json(const CategoryRow& row) {
  return {{"category", row.category},   {"n", row.n},
          {"mean_size", row.mean_size}, {"mean_entropy", row.mean_entropy},
          {"mean_epr", row.mean_epr},   {"method", row.method}};
}

std::string full(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string emit_report(const MetricsReport& report, ReportFormat format) {
  if (format == ReportFormat::json) {
    json doc;
    doc["rows"] = json::array();
    for (const auto& row : report.rows) doc["rows"].push_back(row_json(row));
    doc["overall"] = row_json(report.overall);
    doc["conflict_detection_rate"] = json::object();
    for (const auto& [cat, rate] : report.conflict_detection_rate)
      doc["conflict_detection_rate"][cat] = rate;
    doc["baseline_entropy"] = report.baseline_entropy;
    doc["missing_fixtures"] = report.missing_fixtures;
    doc["warnings"] = report.warnings;
    doc["sentences"] = json::array();
    for (const auto& s : report.sentences) {
      json item = {{"id", s.id},
                   {"category", std::string(to_string(s.category))},
                   {"size", s.metrics.size},
                   {"entropy_bits", s.metrics.entropy_bits},
                   {"epr", s.metrics.epr},
                   {"conflict_detected", s.conflict_detected}};
      if (!s.error.empty()) item["error"] = s.error;
      doc["sentences"].push_back(std::move(item));
    }
    return doc.dump(2) + "\n";
  }

  if (format == ReportFormat::csv) {
    std::ostringstream os;
    os << "category,n,mean_size,mean_entropy,mean_epr,method\n";
    for (const auto& row : report.rows) {
      os << row.category << ',' << row.n << ',' << full(row.mean_size) << ','
         << full(row.mean_entropy) << ',' << full(row.mean_epr) << ',' << row.method << '\n';
    }
    const auto& o = report.overall;
    os << o.category << ',' << o.n << ',' << full(o.mean_size) << ',' << full(o.mean_entropy)
       << ',' << full(o.mean_epr) << ',' << o.method << '\n';
    return os.str();
  }

  std::ostringstream os;
  os << pad("Category", 14) << pad("N", 6) << pad("|S|", 8) << pad("H(S)", 8) << "Method\n";
  auto line = [&](const CategoryRow& row) {
    os << pad(row.category, 14) << pad(std::to_string(row.n), 6)
       << pad(fixed(row.mean_size, 2), 8) << pad(fixed(row.mean_entropy, 3), 8) << row.method
       << '\n';
  };
  for (const auto& row : report.rows) line(row);
  line(report.overall);
  os << '\n';
  for (const auto& [cat, rate] : report.conflict_detection_rate)
    os << "conflict_detection_rate " << cat << " " << fixed(rate, 3) << '\n';
  os << "baseline_entropy " << fixed(report.baseline_entropy, 3) << '\n';
  if (!report.missing_fixtures.empty()) {
    os << "missing_fixtures";
    for (const auto& id : report.missing_fixtures) os << ' ' << id;
    os << '\n';
  }
  return os.str();
}

MultiProviderReport evaluate_providers(const std::vector<CorpusSentence>& corpus,
                                       const PhiConfig& config,
                                       const std::vector<std::string>& providers, int jobs) {
  if (providers.empty()) throw ValidationError("evaluate_providers: provider list is empty");
  MultiProviderReport out;
  out.providers = providers;
  for (const auto& label : providers) {
    PhiConfig c = config;
    c.provider_label = label;
    out.per_provider.push_back(evaluate(corpus, c, jobs));
  }
  const auto& first = out.per_provider.front();
  for (std::size_t r = 0; r < first.rows.size(); ++r) {
    MultiProviderReport::Row row;
    row.category = first.rows[r].category;
    row.n = first.rows[r].n;
    double size_total = 0.0, entropy_total = 0.0;
    for (const auto& rep : out.per_provider) {
      row.mean_size.push_back(rep.rows[r].mean_size);
      row.mean_entropy.push_back(rep.rows[r].mean_entropy);
      size_total += rep.rows[r].mean_size;
      entropy_total += rep.rows[r].mean_entropy;
    }
    row.cross_mean_size = size_total / static_cast<double>(providers.size());
    row.cross_mean_entropy = entropy_total / static_cast<double>(providers.size());
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string emit_report(const MultiProviderReport& report, ReportFormat format) {
  if (format == ReportFormat::json) {
    json doc;
    doc["providers"] = report.providers;
    doc["rows"] = json::array();
    for (const auto& row : report.rows) {
      json item = {{"category", row.category}, {"n", row.n}};
      for (std::size_t p = 0; p < report.providers.size(); ++p) {
        item[report.providers[p]] = {{"mean_size", row.mean_size[p]},
                                     {"mean_entropy", row.mean_entropy[p]}};
      }
      item["mean"] = {{"mean_size", row.cross_mean_size},
                      {"mean_entropy", row.cross_mean_entropy}};
      doc["rows"].push_back(std::move(item));
    }
    return doc.dump(2) + "\n";
  }
  if (format == ReportFormat::csv) {
    std::ostringstream os;
    os << "category,metric";
    for (const auto& p : report.providers) os << ',' << p;
    os << ",mean\n";
    for (const auto& row : report.rows) {
      os << row.category << ",size";
      for (double v : row.mean_size) os << ',' << full(v);
      os << ',' << full(row.cross_mean_size) << '\n';
      os << row.category << ",entropy";
      for (double v : row.mean_entropy) os << ',' << full(v);
      os << ',' << full(row.cross_mean_entropy) << '\n';
    }
    return os.str();
  }
  std::ostringstream os;
  os << pad("Metric", 22);
  for (const auto& p : report.providers) os << pad(p, 10);
  os << "Mean\n";
  for (const auto& row : report.rows) {
    os << pad(row.category + " |S|", 22);
    for (double v : row.mean_size) os << pad(fixed(v, 2), 10);
    os << fixed(row.cross_mean_size, 2) << '\n';
    os << pad(row.category + " H(S)", 22);
    for (double v : row.mean_entropy) os << pad(fixed(v, 3), 10);
    os << fixed(row.cross_mean_entropy, 3) << '\n';
  }
  return os.str();
}

}  // namespace textstate
