#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "textstate/lexicon.hpp"

namespace textstate {

/// The five ambiguity categories a test sentence can belong to.
enum class AmbiguityCategory { adversative, hedging, epistemic, lexical, structural };

std::string_view to_string(AmbiguityCategory c);
AmbiguityCategory ambiguity_category_from_string(std::string_view name);

enum class ExtractionMethod { rule, llm };

std::string_view to_string(ExtractionMethod m);
ExtractionMethod extraction_method_from_string(std::string_view name);

struct CorpusSentence {
  std::string id;
  std::string text;
  Language language = Language::en;
  AmbiguityCategory category = AmbiguityCategory::adversative;
  ExtractionMethod expected_method = ExtractionMethod::rule;
};

/// Parses the JSONL corpus format: one sentence object per line with fields
/// id, text, language, category, expected_method. Rejects duplicate ids and
/// Japanese sentences outside the rule-based categories; schema errors carry
/// the offending line number.
std::vector<CorpusSentence> parse_corpus(std::string_view content);

std::vector<CorpusSentence> load_corpus(const std::filesystem::path& path);

}  // namespace textstate
