#pragma once

// Internal text helpers: UTF-8 iteration, match normalization with an offset
// map back into the original byte string, and word tokenization. Not installed.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace textstate::detail {

// Decodes one code point at `pos`. Returns the byte length consumed (>=1).
// Invalid bytes decode as themselves so processing is total and deterministic.
std::size_t utf8_decode(std::string_view s, std::size_t pos, char32_t& cp);

void utf8_encode(char32_t cp, std::string& out);

// Number of code points, counting only non-whitespace ones.
std::size_t count_nonspace_codepoints(std::string_view s);

bool is_space_cp(char32_t cp);

// Strips leading/trailing whitespace (ASCII plus U+3000).
std::string_view trim_ws(std::string_view s);

// Normalization applied before marker matching: ASCII lowercasing, full-width
// ASCII forms folded to ASCII (U+FF01..U+FF5E), ideographic space to ' '.
// A full Unicode NFKC pass is deliberately not attempted; this subset covers
// the width variants that occur for the shipped marker set.
struct NormalizedText {
  std::string text;
  // to_orig[i] = byte offset in the original string of the code point that
  // produced normalized byte i; to_orig[text.size()] = original size.
  std::vector<std::size_t> to_orig;

  // Valid for positions on code-point boundaries, which all match spans are.
  std::size_t orig(std::size_t norm_pos) const { return to_orig[norm_pos]; }
};

NormalizedText normalize_for_match(std::string_view original);

// Lowercase + width-fold without the offset map, for normalizing lexicon
// surfaces at load time.
std::string normalize_copy(std::string_view s);

// Word token over normalized text: maximal run of [a-z0-9'].
struct Token {
  std::string_view text;
  std::size_t begin = 0;  // byte offsets into the normalized string
  std::size_t end = 0;
};

std::vector<Token> word_tokens(std::string_view normalized);

}  // namespace textstate::detail
