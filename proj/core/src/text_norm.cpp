#include "text_norm.hpp"

namespace textstate::detail {

std::size_t utf8_decode(std::string_view s, std::size_t pos, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  auto cont = [&](std::size_t i) {
    return pos + i < s.size() && (static_cast<unsigned char>(s[pos + i]) & 0xC0) == 0x80;
  };
  auto cb = [&](std::size_t i) { return static_cast<char32_t>(s[pos + i] & 0x3F); };
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    cp = ((b0 & 0x1F) << 6) | cb(1);
    return 2;
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    cp = ((b0 & 0x0F) << 12) | (cb(1) << 6) | cb(2);
    return 3;
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    cp = ((b0 & 0x07) << 18) | (cb(1) << 12) | (cb(2) << 6) | cb(3);
    return 4;
  }
  // Stray byte: pass it through unchanged.
  cp = b0;
  return 1;
}

void utf8_encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space_cp(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' || cp == U'\v' ||
         cp == char32_t{0x3000};
}

std::size_t count_nonspace_codepoints(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size();) {
    char32_t cp;
    i += utf8_decode(s, i, cp);
    if (!is_space_cp(cp)) ++n;
  }
  return n;
}

std::string_view trim_ws(std::string_view s) {
  std::size_t begin = 0;
  while (begin < s.size()) {
    char32_t cp;
    const std::size_t len = utf8_decode(s, begin, cp);
    if (!is_space_cp(cp)) break;
    begin += len;
  }
  // Scan forward remembering the end of the last non-space code point.
  std::size_t end = begin;
  for (std::size_t i = begin; i < s.size();) {
    char32_t cp;
    const std::size_t len = utf8_decode(s, i, cp);
    i += len;
    if (!is_space_cp(cp)) end = i;
  }
  return s.substr(begin, end - begin);
}

namespace {

char32_t fold_cp(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  if (cp >= 0xFF01 && cp <= 0xFF5E) {  // full-width ASCII block
    cp -= 0xFEE0;
    if (cp >= U'A' && cp <= U'Z') cp += 32;
    return cp;
  }
  if (cp == 0x3000) return U' ';
  return cp;
}

}  // namespace

NormalizedText normalize_for_match(std::string_view original) {
  NormalizedText out;
  out.text.reserve(original.size());
  out.to_orig.reserve(original.size() + 1);
  for (std::size_t i = 0; i < original.size();) {
    char32_t cp;
    const std::size_t len = utf8_decode(original, i, cp);
    const std::size_t before = out.text.size();
    utf8_encode(fold_cp(cp), out.text);
    for (std::size_t k = before; k < out.text.size(); ++k) out.to_orig.push_back(i);
    i += len;
  }
  out.to_orig.push_back(original.size());
  return out;
}

std::string normalize_copy(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    char32_t cp;
    i += utf8_decode(s, i, cp);
    utf8_encode(fold_cp(cp), out);
  }
  return out;
}

namespace {

bool is_word_byte(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'';
}

}  // namespace

std::vector<Token> word_tokens(std::string_view normalized) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < normalized.size()) {
    if (!is_word_byte(normalized[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < normalized.size() && is_word_byte(normalized[j])) ++j;
    tokens.push_back({normalized.substr(i, j - i), i, j});
    i = j;
  }
  return tokens;
}

}  // namespace textstate::detail
