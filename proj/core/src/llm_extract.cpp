#include "textstate/llm_extract.hpp"

#include <algorithm>
#include <optional>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "http_client.hpp"
#include "text_norm.hpp"
#include "textstate/errors.hpp"

namespace textstate {

using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kPromptHead = "Given the text: \"";
constexpr std::string_view kConflictNote = "Note: This text contains potential ambiguity markers.";
constexpr std::string_view kPromptBody =
    "List ALL possible interpretations as distinct meanings.\n"
    "For each interpretation, provide:\n"
    "1. The interpretation (a clear restatement of one possible meaning)\n"
    "2. The context/condition under which this interpretation holds\n"
    "3. Confidence weight from 0.0 to 1.0\n"
    "\n"
    "Format each as:\n"
    "INTERP: [interpretation]\n"
    "CONTEXT: [context]\n"
    "CONFIDENCE: [0.0-1.0]\n"
    "---\n";

}  // namespace

InterpPrompt build_prompt(std::string_view text, const FeatureVector& fv) {
  if (detail::trim_ws(text).empty()) throw EmptyInputError("cannot build a prompt for empty text");
  InterpPrompt p;
  p.text = std::string(text);
  p.conflict_note_included = fv.has_conflict();
  std::string r;
  r.append(kPromptHead);
  r.append(text);
  r.append("\"\n\n");
  if (p.conflict_note_included) {
    r.append(kConflictNote);
    r.append("\n\n");
  }
  r.append(kPromptBody);
  p.rendered = std::move(r);
  return p;
}

namespace {

std::string_view strip_code_fences(std::string_view s) {
  s = detail::trim_ws(s);
  if (s.substr(0, 3) != "```") return s;
  const auto first_nl = s.find('\n');
  if (first_nl == std::string_view::npos) return s;
  auto body = s.substr(first_nl + 1);
  const auto closing = body.rfind("```");
  if (closing != std::string_view::npos) body = body.substr(0, closing);
  return detail::trim_ws(body);
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

struct PendingInterp {
  std::string meaning;
  std::string context;
  std::optional<double> confidence;  // absent means "default to 1/n"
};

bool parse_confidence(const json& v, double& out) {
  if (v.is_number()) {
    out = v.get<double>();
    return true;
  }
  if (v.is_string()) {
    try {
      out = std::stod(v.get<std::string>());
      return true;
    } catch (...) {
      return false;
    }
  }
  return false;
}

bool try_structured(std::string_view body, std::vector<PendingInterp>& out) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) {
    // Tolerate prose around the object: retry on the outermost brace span.
    const auto first = body.find('{');
    const auto last = body.rfind('}');
    if (first == std::string_view::npos || last == std::string_view::npos || last <= first)
      return false;
    doc = json::parse(body.substr(first, last - first + 1), nullptr, false);
    if (doc.is_discarded()) return false;
  }
  const json* items = nullptr;
  if (doc.is_object() && doc.contains("interpretations") && doc["interpretations"].is_array()) {
    items = &doc["interpretations"];
  } else if (doc.is_array()) {
    items = &doc;
  } else {
    return false;
  }
  for (const auto& item : *items) {
    if (!item.is_object()) continue;
    PendingInterp p;
    if (item.contains("meaning") && item["meaning"].is_string()) {
      p.meaning = item["meaning"].get<std::string>();
    } else if (item.contains("interpretation") && item["interpretation"].is_string()) {
      p.meaning = item["interpretation"].get<std::string>();
    }
    if (item.contains("context") && item["context"].is_string())
      p.context = item["context"].get<std::string>();
    if (item.contains("confidence")) {
      double c;
      if (parse_confidence(item["confidence"], c)) p.confidence = c;
    }
    p.meaning = std::string(detail::trim_ws(p.meaning));
    if (!p.meaning.empty()) out.push_back(std::move(p));
  }
  return !out.empty();
}

bool starts_with_keyword(std::string_view line, std::string_view keyword, std::string_view& value) {
  if (line.size() < keyword.size()) return false;
  for (std::size_t i = 0; i < keyword.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(line[i])) != keyword[i]) return false;
  }
  value = detail::trim_ws(line.substr(keyword.size()));
  return true;
}

void parse_line_format(std::string_view body, std::vector<PendingInterp>& out) {
  PendingInterp current;
  auto flush = [&] {
    current.meaning = std::string(detail::trim_ws(current.meaning));
    if (!current.meaning.empty()) out.push_back(current);
    current = PendingInterp{};
  };
  std::istringstream stream{std::string(body)};
  std::string raw_line;
  while (std::getline(stream, raw_line)) {
    const std::string_view line = detail::trim_ws(raw_line);
    if (line.rfind("---", 0) == 0) {
      flush();
      continue;
    }
    std::string_view value;
    if (starts_with_keyword(line, "INTERP:", value)) {
      if (!current.meaning.empty()) flush();  // block separator was omitted
      current.meaning = std::string(value);
    } else if (starts_with_keyword(line, "CONTEXT:", value)) {
      current.context = std::string(value);
    } else if (starts_with_keyword(line, "CONFIDENCE:", value)) {
      try {
        current.confidence = std::stod(std::string(value));
      } catch (...) {
        // leave unset; defaults to 1/n
      }
    }
  }
  flush();
}

}  // namespace

std::vector<RawInterpretation> parse_llm_response(std::string_view raw) {
  const std::string_view body = strip_code_fences(raw);
  std::vector<PendingInterp> pending;
  if (!try_structured(body, pending)) {
    pending.clear();
    parse_line_format(body, pending);
  }
  if (pending.empty()) throw MalformedResponseError(std::string(raw));

  const double fallback = 1.0 / static_cast<double>(pending.size());
  std::vector<RawInterpretation> out;
  out.reserve(pending.size());
  for (auto& p : pending) {
    RawInterpretation r;
    r.meaning = std::move(p.meaning);
    r.context_label = p.context.empty() ? "unspecified" : std::move(p.context);
    r.confidence = clamp01(p.confidence.value_or(fallback));
    r.source = Source::llm;
    out.push_back(std::move(r));
  }
  return out;
}

ProviderConfig provider_config_from_json(std::string_view content) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("provider config: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("provider config must be a JSON object");
  ProviderConfig cfg;
  if (doc.contains("endpoint")) cfg.endpoint = doc["endpoint"].get<std::string>();
  if (cfg.endpoint.empty()) throw ValidationError("provider config: 'endpoint' is required");
  if (doc.contains("model_id")) cfg.model_id = doc["model_id"].get<std::string>();
  if (doc.contains("auth_env")) cfg.auth_env = doc["auth_env"].get<std::string>();
  if (doc.contains("timeout_ms"))
    cfg.timeout = std::chrono::milliseconds(doc["timeout_ms"].get<long>());
  if (doc.contains("max_concurrency")) cfg.max_concurrency = doc["max_concurrency"].get<int>();
  if (doc.contains("provider_label")) cfg.provider_label = doc["provider_label"].get<std::string>();
  if (doc.contains("max_retries")) cfg.max_retries = doc["max_retries"].get<int>();
  if (doc.contains("retry_base_ms")) cfg.retry_base_ms = doc["retry_base_ms"].get<int>();
  if (cfg.timeout.count() <= 0) throw ValidationError("provider config: timeout must be > 0");
  if (cfg.max_concurrency < 1)
    throw ValidationError("provider config: max_concurrency must be >= 1");
  return cfg;
}

std::string fixture_to_json(const Fixture& f) {
  json doc;
  doc["sentence_id"] = f.sentence_id;
  doc["provider_label"] = f.provider_label;
  if (!f.text.empty()) doc["text"] = f.text;
  doc["raw_response"] = f.raw_response;
  doc["parsed"] = json::array();
  for (const auto& p : f.parsed) {
    doc["parsed"].push_back({{"meaning", p.meaning},
                             {"context", p.context_label},
                             {"confidence", p.confidence},
                             {"source", std::string(to_string(p.source))}});
  }
  return doc.dump(2) + "\n";
}

Fixture fixture_from_json(std::string_view content) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("fixture: ") + e.what());
  }
  Fixture f;
  if (!doc.contains("sentence_id") || !doc["sentence_id"].is_string())
    throw ValidationError("fixture: missing string field 'sentence_id'");
  f.sentence_id = doc["sentence_id"].get<std::string>();
  if (!doc.contains("provider_label") || !doc["provider_label"].is_string())
    throw ValidationError("fixture: missing string field 'provider_label'");
  f.provider_label = doc["provider_label"].get<std::string>();
  if (doc.contains("text")) f.text = doc["text"].get<std::string>();
  if (!doc.contains("raw_response") || !doc["raw_response"].is_string())
    throw ValidationError("fixture: missing string field 'raw_response'");
  f.raw_response = doc["raw_response"].get<std::string>();
  // `parsed` is derived data; recomputing keeps the invariant with the raw
  // response no matter what the file claims.
  f.parsed = parse_llm_response(f.raw_response);
  return f;
}

void FixtureStore::add(Fixture f) { fixtures_.push_back(std::move(f)); }

FixtureStore FixtureStore::load_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw ValidationError("fixture store: not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  FixtureStore store;
  for (const auto& p : files) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      store.add(fixture_from_json(buf.str()));
    } catch (const Error& e) {
      throw ValidationError("fixture store: " + p.filename().string() + ": " + e.what());
    }
  }
  return store;
}

const Fixture* FixtureStore::find(std::string_view provider_label, std::string_view sentence_id,
                                  std::string_view text) const {
  if (!sentence_id.empty()) {
    for (const auto& f : fixtures_) {
      if (f.provider_label == provider_label && f.sentence_id == sentence_id) return &f;
    }
  }
  if (!text.empty()) {
    for (const auto& f : fixtures_) {
      if (f.provider_label == provider_label && !f.text.empty() && f.text == text) return &f;
    }
  }
  return nullptr;
}

std::vector<std::string> FixtureStore::provider_labels() const {
  std::vector<std::string> labels;
  for (const auto& f : fixtures_) {
    if (std::find(labels.begin(), labels.end(), f.provider_label) == labels.end())
      labels.push_back(f.provider_label);
  }
  std::sort(labels.begin(), labels.end());
  return labels;
}

std::filesystem::path FixtureStore::write_fixture(const std::filesystem::path& dir,
                                                  const Fixture& f) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (f.sentence_id + "__" + f.provider_label + ".json");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("fixture store: cannot write " + path.string());
  out << fixture_to_json(f);
  return path;
}

namespace {

std::string chat_completion(const ProviderConfig& provider, const std::string& prompt) {
  json body = {
      {"model", provider.model_id},
      {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
  };
  detail::HttpRequestOptions opts;
  opts.url = provider.endpoint;
  opts.auth_env = provider.auth_env;
  opts.timeout = provider.timeout;
  opts.max_retries = provider.max_retries;
  opts.retry_base_ms = provider.retry_base_ms;
  const std::string response = detail::post_json(opts, body.dump());

  json doc = json::parse(response, nullptr, false);
  if (!doc.is_discarded()) {
    if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
      const auto& choice = doc["choices"][0];
      if (choice.contains("message") && choice["message"].contains("content"))
        return choice["message"]["content"].get<std::string>();
      if (choice.contains("text")) return choice["text"].get<std::string>();
    }
    if (doc.contains("content") && doc["content"].is_string())
      return doc["content"].get<std::string>();
  }
  throw MalformedResponseError(response);
}

}  // namespace

std::vector<RawInterpretation> llm_extract(std::string_view text, const FeatureVector& fv,
                                           const LlmExtractOptions& opts) {
  if (opts.mode == ExtractionMode::live) {
    if (opts.provider == nullptr)
      throw ValidationError("live extraction requires a provider config");
    const InterpPrompt prompt = build_prompt(text, fv);
    return parse_llm_response(chat_completion(*opts.provider, prompt.rendered));
  }
  if (opts.fixtures == nullptr)
    throw FixtureNotFoundError("replay extraction requires a fixture store");
  const Fixture* f = opts.fixtures->find(opts.provider_label, opts.sentence_id, text);
  if (f == nullptr) {
    const std::string key = opts.sentence_id.empty() ? std::string(text) : opts.sentence_id;
    throw FixtureNotFoundError("no fixture for provider '" + opts.provider_label + "' and key '" +
                               key + "'");
  }
  return f->parsed;
}

RecordOutcome record_fixtures(const std::vector<CorpusSentence>& sentences,
                              const ProviderConfig& provider,
                              const std::filesystem::path& out_dir, const MarkerLexicon& lexicon) {
  std::filesystem::create_directories(out_dir);
  RecordOutcome outcome;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  const std::size_t workers =
      std::min<std::size_t>(std::max(1, provider.max_concurrency), std::max<std::size_t>(1, sentences.size()));

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= sentences.size()) return;
      const auto& s = sentences[i];
      try {
        const auto filter = s.language == Language::jp ? LanguageFilter::jp : LanguageFilter::en;
        const FeatureVector fv = detect_conflict_markers(s.text, lexicon, filter);
        const InterpPrompt prompt = build_prompt(s.text, fv);
        Fixture f;
        f.sentence_id = s.id;
        f.provider_label = provider.provider_label;
        f.text = s.text;
        f.raw_response = chat_completion(provider, prompt.rendered);
        f.parsed = parse_llm_response(f.raw_response);
        FixtureStore::write_fixture(out_dir, f);
        std::lock_guard lock(mu);
        ++outcome.written;
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        outcome.failures.push_back({s.id, e.what()});
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::sort(outcome.failures.begin(), outcome.failures.end(),
            [](const RecordFailure& a, const RecordFailure& b) {
              return a.sentence_id < b.sentence_id;
            });
  return outcome;
}

}  // namespace textstate
