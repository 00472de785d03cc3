#include <algorithm>
#include <vector>
#include <cstdint>

#include "reqfuse/textrep.hpp"

namespace reqfuse {
namespace {

constexpr char32_t kInvalid = 0xFFFD;

// Decodes one code point starting at text[i]; advances i. Malformed input
// yields U+FFFD and consumes a single byte.
char32_t next_code_point(std::string_view text, std::size_t& i) {
  const auto lead = static_cast<unsigned char>(text[i]);
  if (lead < 0x80) {
    ++i;
    return lead;
  }
  int extra = 0;
  char32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++i;
    return kInvalid;
  }
  if (i + static_cast<std::size_t>(extra) >= text.size()) {
    ++i;
    return kInvalid;
  }
  for (int e = 1; e <= extra; ++e) {
    const auto cont = static_cast<unsigned char>(text[i + static_cast<std::size_t>(e)]);
    if ((cont & 0xC0) != 0x80) {
      ++i;
      return kInvalid;
    }
    cp = (cp << 6) | (cont & 0x3F);
  }
  i += static_cast<std::size_t>(extra) + 1;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
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

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return in(cp, '0', '9') || in(cp, 'a', 'z') || in(cp, 'A', 'Z');
  }
  if (cp == kInvalid || cp == 0xFEFF) return false;
  if (in(cp, 0x80, 0xBF)) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return false;
  // Punctuation and symbol blocks.
  if (in(cp, 0x2000, 0x2BFF)) return false;
  if (in(cp, 0x2E00, 0x2E7F)) return false;
  if (in(cp, 0x3000, 0x303F)) return false;
  if (in(cp, 0xFE10, 0xFE1F) || in(cp, 0xFE30, 0xFE6F)) return false;
  if (in(cp, 0xFF00, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) || in(cp, 0xFF3B, 0xFF40) || in(cp, 0xFF5B, 0xFF65)) {
    return false;
  }
  if (in(cp, 0x1F000, 0x1FAFF)) return false;
  return true;
}

char32_t to_lower(char32_t cp) {
  if (in(cp, 'A', 'Z')) return cp + 32;
  if (cp < 0xC0) return cp;
  if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 32;
  if (in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) return (cp % 2 == 0) ? cp + 1 : cp;
  if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;
  if (in(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 32;
  if (in(cp, 0x410, 0x42F)) return cp + 32;
  if (in(cp, 0x400, 0x40F)) return cp + 80;
  return cp;
}

constexpr std::string_view kStopwords[] = {
    "a",       "about",   "above",  "after",   "again",  "against", "all",     "am",     "an",     "and",
    "any",     "are",     "as",     "at",      "be",     "because", "been",    "before", "being",  "below",
    "between", "both",    "but",    "by",      "can",    "could",   "did",     "do",     "does",   "doing",
    "down",    "during",  "each",   "few",     "for",    "from",    "further", "had",    "has",    "have",
    "having",  "he",      "her",    "here",    "hers",   "herself", "him",     "himself", "his",   "how",
    "i",       "if",      "in",     "into",    "is",     "it",      "its",     "itself", "just",   "me",
    "more",    "most",    "my",     "myself",  "no",     "nor",     "not",     "now",    "of",     "off",
    "on",      "once",    "only",   "or",      "other",  "our",     "ours",    "ourselves", "out", "over",
    "own",     "s",       "same",   "she",     "should", "so",      "some",    "such",   "t",      "than",
    "that",    "the",     "their",  "theirs",  "them",   "themselves", "then", "there",  "these",  "they",
    "this",    "those",   "through", "to",     "too",    "under",   "until",   "up",     "very",   "was",
    "we",      "were",    "what",   "when",    "where",  "which",   "while",   "who",    "whom",   "why",
    "will",    "with",    "would",  "you",     "your",   "yours",   "yourself",
};

}  // namespace

bool is_stopword(std::string_view word) {
  static const auto sorted = [] {
    std::vector<std::string_view> words(std::begin(kStopwords), std::end(kStopwords));
    std::sort(words.begin(), words.end());
    return words;
  }();
  return std::binary_search(sorted.begin(), sorted.end(), word);
}

TokenList tokenize(std::string_view text, const TokenizeOptions& options) {
  TokenList tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (options.remove_stopwords && is_stopword(current)) {
      current.clear();
      return;
    }
    tokens.push_back(options.stem ? porter_stem(current) : current);
    current.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = next_code_point(text, i);
    if (!is_word_char(cp)) {
      flush();
      continue;
    }
    append_utf8(current, options.lowercase ? to_lower(cp) : cp);
  }
  flush();
  return tokens;
}

}  // namespace reqfuse
