// textstate: command-line front end for conflict detection, text-to-state
// mapping, fixture recording, and corpus evaluation.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "textstate/corpus.hpp"
#include "textstate/errors.hpp"
#include "textstate/evaluate.hpp"
#include "textstate/lexicon.hpp"
#include "textstate/llm_extract.hpp"
#include "textstate/pipeline.hpp"
#include "textstate/state.hpp"

namespace fs = std::filesystem;
using namespace textstate;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomainError = 1;
constexpr int kExitUsageError = 2;

#ifndef TEXTSTATE_BUNDLED_DATA_DIR
#define TEXTSTATE_BUNDLED_DATA_DIR ""
#endif

fs::path data_dir() {
  if (const char* env = std::getenv("TEXTSTATE_DATA_DIR"); env != nullptr && *env)
    return fs::path(env);
  return fs::path(TEXTSTATE_BUNDLED_DATA_DIR);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string read_stdin() {
  std::ostringstream buf;
  buf << std::cin.rdbuf();
  return buf.str();
}

void write_output(const std::string& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write file: " + out_path);
  out << payload;
}

struct TextInput {
  std::string text;
  bool use_stdin = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("text", text, "Input text (or use --stdin)");
    cmd->add_flag("--stdin", use_stdin, "Read the input text from standard input");
  }

  // Empty input is a usage error, signalled via CLI11 so it exits with 2.
  std::string resolve() const {
    std::string value = text;
    if (use_stdin) {
      if (!text.empty()) throw CLI::ValidationError("pass either TEXT or --stdin, not both");
      value = read_stdin();
    }
    while (!value.empty() && (value.back() == '\n' || value.back() == '\r')) value.pop_back();
    if (value.find_first_not_of(" \t\r\n") == std::string::npos)
      throw CLI::ValidationError("input text must be non-empty");
    return value;
  }
};

LanguageFilter parse_lang(const std::string& name) {
  if (name == "en") return LanguageFilter::en;
  if (name == "jp") return LanguageFilter::jp;
  if (name == "auto" || name == "any") return LanguageFilter::any;
  throw ValidationError("unknown language: '" + name + "'");
}

std::shared_ptr<const MarkerLexicon> load_lexicon_opt(const std::string& path) {
  if (path.empty()) return nullptr;
  return std::make_shared<MarkerLexicon>(MarkerLexicon::from_json(read_file(path)));
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Environment bindings sit between command-line flags and the config file
// (flags > environment > config file > defaults). CLI11 resolves its config
// file before its env hooks, so the env values are injected as arguments
// up front instead, only when the flag is absent.
void apply_env_bindings(std::vector<std::string>& args) {
  static const struct {
    const char* subcommand;
    const char* flag;
    const char* env;
  } kBindings[] = {
      {"detect", "--lang", "TEXTSTATE_LANG"},
      {"map", "--lang", "TEXTSTATE_LANG"},
      {"map", "--fixtures", "TEXTSTATE_FIXTURES"},
      {"eval", "--fixtures", "TEXTSTATE_FIXTURES"},
      {"eval", "--corpus", "TEXTSTATE_CORPUS"},
      {"record", "--corpus", "TEXTSTATE_CORPUS"},
  };
  std::string subcommand;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      ++i;  // skip the config path
      continue;
    }
    if (!args[i].empty() && args[i][0] != '-') {
      subcommand = args[i];
      break;
    }
  }
  if (subcommand.empty()) return;
  for (const auto& b : kBindings) {
    if (subcommand != b.subcommand) continue;
    const char* value = std::getenv(b.env);
    if (value == nullptr || *value == '\0') continue;
    bool given = false;
    for (const auto& a : args) {
      if (a == b.flag || a.rfind(std::string(b.flag) + "=", 0) == 0) given = true;
    }
    if (!given) {
      args.emplace_back(b.flag);
      args.emplace_back(value);
    }
  }
}

const auto kTauCheck = CLI::Validator(
    [](std::string& v) -> std::string {
      const double tau = std::strtod(v.c_str(), nullptr);
      return (tau > 0.0 && tau < 1.0) ? "" : "tau must lie in (0, 1)";
    },
    "TAU");

const auto kBetaCheck = CLI::Validator(
    [](std::string& v) -> std::string {
      const double beta = std::strtod(v.c_str(), nullptr);
      return beta >= 0.0 ? "" : "beta must be >= 0";
    },
    "BETA");

// ---------------------------------------------------------------- detect --

struct DetectArgs {
  TextInput input;
  std::string lang = "auto";
  std::string lexicon_path;
};

int run_detect(const DetectArgs& args) {
  const auto lexicon = load_lexicon_opt(args.lexicon_path);
  const MarkerLexicon& lex = lexicon ? *lexicon : MarkerLexicon::builtin();
  const FeatureVector fv = detect_conflict_markers(args.input.text, lex, parse_lang(args.lang));
  std::cout << feature_vector_to_json(fv);
  return kExitOk;
}

// ------------------------------------------------------------------- map --

struct MapArgs {
  TextInput input;
  std::string mode = "hybrid";
  double tau = 0.85;
  double beta = 0.5;
  std::string lang = "auto";
  std::string lexicon_path;
  std::string fixtures_dir;
  std::string provider_label = "chatgpt";
  std::string provider_config_path;
  bool live = false;
  bool emit_embeddings = false;
};

PhiConfig make_phi_config(const std::string& mode, double tau, double beta,
                          const std::string& lang, const std::string& lexicon_path,
                          const std::string& fixtures_dir, const std::string& provider_label,
                          const std::string& provider_config_path, bool live) {
  PhiConfig config;
  config.mode = phi_mode_from_string(mode);
  config.merge_policy.tau = tau;
  config.beta = beta;
  config.language = parse_lang(lang);
  config.lexicon = load_lexicon_opt(lexicon_path);
  config.provider_label = provider_label;
  if (!fixtures_dir.empty())
    config.fixtures = std::make_shared<FixtureStore>(FixtureStore::load_dir(fixtures_dir));
  if (live) {
    if (provider_config_path.empty())
      throw ValidationError("--live requires --provider-config");
    config.extraction = ExtractionMode::live;
    config.provider =
        std::make_shared<ProviderConfig>(provider_config_from_json(read_file(provider_config_path)));
  }
  return config;
}

int run_map(const MapArgs& args) {
  const PhiConfig config =
      make_phi_config(args.mode, args.tau, args.beta, args.lang, args.lexicon_path,
                      args.fixtures_dir, args.provider_label, args.provider_config_path, args.live);
  const State state = phi(args.input.text, config);
  for (const auto& w : state.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << state_to_json(state, args.emit_embeddings);
  return kExitOk;
}

// ------------------------------------------------------------------ eval --

struct EvalArgs {
  std::string corpus_path;
  std::string mode = "hybrid";
  double tau = 0.85;
  double beta = 0.5;
  std::string lexicon_path;
  std::string fixtures_dir;
  std::string provider_label = "chatgpt";
  std::string providers_csv;
  std::string categories_csv;
  std::string format = "table";
  std::string out_path;
  int jobs = 0;
};

int run_eval(const EvalArgs& args) {
  fs::path corpus_path = args.corpus_path.empty() ? data_dir() / "corpus.jsonl"
                                                  : fs::path(args.corpus_path);
  std::vector<CorpusSentence> corpus = load_corpus(corpus_path);

  if (!args.categories_csv.empty()) {
    std::vector<CorpusSentence> filtered;
    for (const auto& name : split_csv(args.categories_csv)) {
      const AmbiguityCategory cat = ambiguity_category_from_string(name);
      for (const auto& s : corpus) {
        if (s.category == cat) filtered.push_back(s);
      }
    }
    corpus = std::move(filtered);
  }

  PhiConfig config;
  config.mode = phi_mode_from_string(args.mode);
  config.merge_policy.tau = args.tau;
  config.beta = args.beta;
  config.lexicon = load_lexicon_opt(args.lexicon_path);
  config.provider_label = args.provider_label;
  fs::path fixtures_dir =
      args.fixtures_dir.empty() ? data_dir() / "fixtures" : fs::path(args.fixtures_dir);
  if (fs::is_directory(fixtures_dir))
    config.fixtures = std::make_shared<FixtureStore>(FixtureStore::load_dir(fixtures_dir));

  const ReportFormat format = report_format_from_string(args.format);

  bool had_errors = false;
  if (!args.providers_csv.empty()) {
    const MultiProviderReport report =
        evaluate_providers(corpus, config, split_csv(args.providers_csv), args.jobs);
    write_output(emit_report(report, format), args.out_path);
    for (const auto& rep : report.per_provider) {
      for (const auto& id : rep.missing_fixtures) {
        std::cerr << "missing fixture: " << id << "\n";
        had_errors = true;
      }
      for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    }
  } else {
    const MetricsReport report = evaluate(corpus, config, args.jobs);
    write_output(emit_report(report, format), args.out_path);
    for (const auto& id : report.missing_fixtures) {
      std::cerr << "missing fixture: " << id << "\n";
      had_errors = true;
    }
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& s : report.sentences) {
      if (!s.error.empty() && !s.missing_fixture) {
        std::cerr << "error: " << s.id << ": " << s.error << "\n";
        had_errors = true;
      }
    }
  }
  return had_errors ? kExitDomainError : kExitOk;
}

// ---------------------------------------------------------------- record --

struct RecordArgs {
  std::string corpus_path;
  std::string provider_config_path;
  std::string fixtures_out;
  std::string categories_csv;
  bool only_llm = false;
};

int run_record(const RecordArgs& args) {
  fs::path corpus_path = args.corpus_path.empty() ? data_dir() / "corpus.jsonl"
                                                  : fs::path(args.corpus_path);
  std::vector<CorpusSentence> corpus = load_corpus(corpus_path);
  if (args.only_llm) {
    std::erase_if(corpus,
                  [](const CorpusSentence& s) { return s.expected_method != ExtractionMethod::llm; });
  }
  if (!args.categories_csv.empty()) {
    std::vector<AmbiguityCategory> cats;
    for (const auto& name : split_csv(args.categories_csv))
      cats.push_back(ambiguity_category_from_string(name));
    std::erase_if(corpus, [&](const CorpusSentence& s) {
      return std::find(cats.begin(), cats.end(), s.category) == cats.end();
    });
  }

  const ProviderConfig provider = provider_config_from_json(read_file(args.provider_config_path));
  const RecordOutcome outcome = record_fixtures(corpus, provider, args.fixtures_out);
  for (const auto& f : outcome.failures)
    std::cerr << "record failed: " << f.sentence_id << ": " << f.error << "\n";
  std::cout << "recorded " << outcome.written << " fixtures to " << args.fixtures_out << " ("
            << outcome.failures.size() << " failures)\n";
  return outcome.failures.empty() ? kExitOk : kExitDomainError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maps ambiguous text to a non-collapsing state of coexisting interpretations"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from an INI/TOML file");
  app.set_version_flag("--version", "textstate 0.1.0");

  DetectArgs detect_args;
  auto* detect_cmd = app.add_subcommand("detect", "Detect conflict markers in a text");
  detect_args.input.attach(detect_cmd);
  detect_cmd->add_option("--lang", detect_args.lang, "Language filter: en, jp, auto");
  detect_cmd->add_option("--lexicon", detect_args.lexicon_path, "Marker lexicon JSON file");

  MapArgs map_args;
  auto* map_cmd = app.add_subcommand("map", "Map a text to its interpretation state");
  map_args.input.attach(map_cmd);
  map_cmd->add_option("--mode", map_args.mode, "Extraction mode: rule, llm, hybrid");
  map_cmd->add_option("--tau", map_args.tau, "Deduplication threshold")->check(kTauCheck);
  map_cmd->add_option("--beta", map_args.beta, "Conflict weight boost")->check(kBetaCheck);
  map_cmd->add_option("--lang", map_args.lang, "Language filter: en, jp, auto");
  map_cmd->add_option("--lexicon", map_args.lexicon_path, "Marker lexicon JSON file");
  map_cmd->add_option("--fixtures", map_args.fixtures_dir, "Fixture directory for replay mode");
  map_cmd->add_option("--provider", map_args.provider_label, "Fixture provider label");
  map_cmd->add_flag("--live", map_args.live, "Query a live provider instead of replaying");
  map_cmd->add_option("--provider-config", map_args.provider_config_path,
                      "Provider config JSON (endpoint, model_id, auth_env, ...)");
  map_cmd->add_flag("--emit-embeddings", map_args.emit_embeddings,
                    "Include embedding vectors in the state JSON");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a corpus and report per-category metrics");
  eval_cmd->add_option("--corpus", eval_args.corpus_path, "Corpus JSONL file");
  eval_cmd->add_option("--mode", eval_args.mode, "Extraction mode: rule, llm, hybrid");
  eval_cmd->add_option("--tau", eval_args.tau, "Deduplication threshold")->check(kTauCheck);
  eval_cmd->add_option("--beta", eval_args.beta, "Conflict weight boost")->check(kBetaCheck);
  eval_cmd->add_option("--lexicon", eval_args.lexicon_path, "Marker lexicon JSON file");
  eval_cmd->add_option("--fixtures", eval_args.fixtures_dir, "Fixture directory");
  eval_cmd->add_option("--provider", eval_args.provider_label, "Fixture provider label");
  eval_cmd->add_option("--providers", eval_args.providers_csv,
                       "Comma-separated provider labels for a cross-provider report");
  eval_cmd->add_option("--categories", eval_args.categories_csv,
                       "Comma-separated category filter");
  eval_cmd->add_option("--format", eval_args.format, "Report format: table, json, csv");
  eval_cmd->add_option("--out", eval_args.out_path, "Write the report to a file");
  eval_cmd->add_option("--jobs", eval_args.jobs, "Worker threads (default: logical cores)");

  RecordArgs record_args;
  auto* record_cmd = app.add_subcommand("record", "Record live provider fixtures for a corpus");
  record_cmd->add_option("--corpus", record_args.corpus_path, "Corpus JSONL file");
  record_cmd->add_option("--provider-config", record_args.provider_config_path,
                         "Provider config JSON")
      ->required();
  record_cmd->add_option("--fixtures-out", record_args.fixtures_out, "Output fixture directory")
      ->required();
  record_cmd->add_option("--categories", record_args.categories_csv,
                         "Comma-separated category filter");
  record_cmd->add_flag("--only-llm", record_args.only_llm,
                       "Record only sentences expecting LLM extraction");

  std::string dump_out;
  auto* dump_cmd = app.add_subcommand("lexicon-dump", "Dump the built-in marker lexicon as JSON");
  dump_cmd->add_option("--out", dump_out, "Write to a file instead of stdout");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    apply_env_bindings(args);
    std::reverse(args.begin(), args.end());  // CLI11's vector overload wants reversed args

    try {
      app.parse(std::move(args));
      // Input-text validation lives outside parse(): resolve() may read stdin.
      if (detect_cmd->parsed()) detect_args.input.text = detect_args.input.resolve();
      if (map_cmd->parsed()) map_args.input.text = map_args.input.resolve();
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return kExitUsageError;
    }

    if (detect_cmd->parsed()) return run_detect(detect_args);
    if (map_cmd->parsed()) return run_map(map_args);
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (record_cmd->parsed()) return run_record(record_args);
    if (dump_cmd->parsed()) {
      write_output(MarkerLexicon::builtin().to_json(), dump_out);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitUsageError;
}
