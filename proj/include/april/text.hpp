#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace april::text {

inline bool is_token_byte(unsigned char c) {
  // Bytes >= 0x80 belong to UTF-8 multi-byte letters; keep them inside tokens.
  return std::isalnum(c) != 0 || c >= 0x80;
}

/// Lowercased maximal runs of letters/digits. No stemming, no stopwords.
inline std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : s) {
    if (is_token_byte(c)) {
      cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline bool is_abbreviation(std::string_view word) {
  static constexpr std::array<std::string_view, 34> kGuard = {
      "mr",  "mrs", "ms",  "dr",   "prof", "sr",  "jr",  "st",  "vs",
      "etc", "inc", "ltd", "co",   "corp", "no",  "gen", "gov", "sen",
      "rep", "lt",  "col", "capt", "jan",  "feb", "mar", "apr", "aug",
      "sept", "sep", "oct", "nov", "dec",  "fig", "approx"};
  std::string lower(word);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower.size() == 1 && std::isalpha(static_cast<unsigned char>(lower[0]))) return true;  // initials
  return std::find(kGuard.begin(), kGuard.end(), lower) != kGuard.end();
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

/// Splits on '.', '!' or '?' followed by whitespace (closing quotes and
/// brackets may sit in between) and on blank lines. A '.' directly after a
/// guarded abbreviation or a single-letter initial does not end a sentence.
inline std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    std::string t = trim(s.substr(start, end - start));
    if (!t.empty()) out.push_back(std::move(t));
    start = end;
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '\n') {
      std::size_t j = i + 1;
      while (j < s.size() && (s[j] == ' ' || s[j] == '\t' || s[j] == '\r')) ++j;
      if (j < s.size() && s[j] == '\n') {
        flush(i);
        i = j;
      }
      continue;
    }
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i + 1;
    while (j < s.size() && (s[j] == '"' || s[j] == '\'' || s[j] == ')' || s[j] == ']')) ++j;
    if (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) continue;
    if (c == '.') {
      std::size_t w = i;
      while (w > start && is_token_byte(static_cast<unsigned char>(s[w - 1]))) --w;
      if (w < i && is_abbreviation(s.substr(w, i - w))) continue;
    }
    flush(j);
    i = j > 0 ? j - 1 : 0;
  }
  flush(s.size());
  return out;
}

inline std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '\n') {
      std::string t = trim(s.substr(start, i - start));
      if (!t.empty()) out.push_back(std::move(t));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace april::text
