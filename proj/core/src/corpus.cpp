#include "textstate/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "text_norm.hpp"
#include "textstate/errors.hpp"

namespace textstate {

namespace {

constexpr std::string_view kCategoryNames[] = {"adversative", "hedging", "epistemic", "lexical",
                                               "structural"};

}  // namespace

std::string_view to_string(AmbiguityCategory c) {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

AmbiguityCategory ambiguity_category_from_string(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kCategoryNames); ++i) {
    if (kCategoryNames[i] == name) return static_cast<AmbiguityCategory>(i);
  }
  throw ValidationError("unknown ambiguity category: '" + std::string(name) + "'");
}

std::string_view to_string(ExtractionMethod m) {
  return m == ExtractionMethod::rule ? "rule" : "llm";
}

ExtractionMethod extraction_method_from_string(std::string_view name) {
  if (name == "rule") return ExtractionMethod::rule;
  if (name == "llm") return ExtractionMethod::llm;
  throw ValidationError("unknown extraction method: '" + std::string(name) + "'");
}

namespace {

std::string require_string(const nlohmann::json& obj, const char* key, int line) {
  if (!obj.contains(key) || !obj[key].is_string())
    throw ParseError(std::string("corpus: missing string field '") + key + "'", line);
  auto value = obj[key].get<std::string>();
  if (value.empty())
    throw ParseError(std::string("corpus: field '") + key + "' must be non-empty", line);
  return value;
}

bool rule_based(AmbiguityCategory c) {
  return c == AmbiguityCategory::adversative || c == AmbiguityCategory::hedging;
}

}  // namespace

std::vector<CorpusSentence> parse_corpus(std::string_view content) {
  std::vector<CorpusSentence> out;
  std::set<std::string> ids;
  std::istringstream stream{std::string(content)};
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (detail::trim_ws(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("corpus: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw ParseError("corpus: each line must be a JSON object", line_no);

    CorpusSentence s;
    s.id = require_string(obj, "id", line_no);
    s.text = require_string(obj, "text", line_no);
    try {
      s.language = language_from_string(require_string(obj, "language", line_no));
      s.category = ambiguity_category_from_string(require_string(obj, "category", line_no));
      s.expected_method =
          extraction_method_from_string(require_string(obj, "expected_method", line_no));
    } catch (const ValidationError& e) {
      throw ParseError(std::string("corpus: ") + e.what(), line_no);
    }

    if (s.language == Language::jp && !rule_based(s.category))
      throw ParseError("corpus: Japanese sentences are only defined for the rule-based "
                       "categories (adversative, hedging)",
                       line_no);
    if (!ids.insert(s.id).second) throw ValidationError("corpus: duplicate id '" + s.id + "'");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<CorpusSentence> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("corpus: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str());
}

}  // namespace textstate
