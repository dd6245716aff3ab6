#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "endstyle/errors.hpp"

namespace endstyle {

// Synthetic sentence-start symbol. Prepended by normalize(); participates in
// word n-grams but never in character n-grams.
inline constexpr const char* kStart = "START";

// Tag reserved for the START symbol.
inline constexpr const char* kStartTag = "START";

struct TokenizedSentence {
  std::vector<std::string> tokens;  // tokens[0] == kStart
  std::string raw;                  // original surface string
};

namespace detail {

inline bool is_detachable_punct(char c) {
  static constexpr std::string_view puncts = ".,!?;:'\"()";
  return puncts.find(c) != std::string_view::npos;
}

inline bool is_clitic(std::string_view s) {
  static constexpr std::array<std::string_view, 7> clitics = {
      "'s", "n't", "'d", "'ll", "'re", "'ve", "'m"};
  for (const auto c : clitics) {
    if (s == c) return true;
  }
  return false;
}

// Longest clitic suffix leaving a non-empty remainder, or 0.
inline std::size_t clitic_suffix_len(std::string_view s) {
  static constexpr std::array<std::string_view, 7> clitics = {
      "n't", "'ll", "'re", "'ve", "'s", "'d", "'m"};
  for (const auto c : clitics) {
    if (s.size() > c.size() && s.substr(s.size() - c.size()) == c) {
      return c.size();
    }
  }
  return 0;
}

inline void split_chunk(std::string_view chunk,
                        std::vector<std::string>& out) {
  if (is_clitic(chunk)) {
    out.emplace_back(chunk);
    return;
  }
  std::vector<std::string> leading;
  std::vector<std::string> trailing;  // collected in strip order
  while (!chunk.empty() && is_detachable_punct(chunk.front())) {
    leading.emplace_back(1, chunk.front());
    chunk.remove_prefix(1);
  }
  while (!chunk.empty() && is_detachable_punct(chunk.back())) {
    trailing.emplace_back(1, chunk.back());
    chunk.remove_suffix(1);
  }
  std::vector<std::string> clitics;  // rightmost first
  if (!is_clitic(chunk)) {
    for (std::size_t len = clitic_suffix_len(chunk); len != 0;
         len = clitic_suffix_len(chunk)) {
      clitics.emplace_back(chunk.substr(chunk.size() - len));
      chunk.remove_suffix(len);
    }
  }
  for (auto& t : leading) out.push_back(std::move(t));
  if (!chunk.empty()) out.emplace_back(chunk);
  for (auto it = clitics.rbegin(); it != clitics.rend(); ++it) {
    out.push_back(std::move(*it));
  }
  for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) {
    out.push_back(std::move(*it));
  }
}

}  // namespace detail

// Whitespace split, then leading/trailing .,!?;:'"() detach as single-char
// tokens and clitics ('s n't 'd 'll 're 've 'm) split off. Case preserved.
// Joining the output with single spaces and re-tokenizing is a fixed point.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' ||
                               text[i] == '\n' || text[i] == '\r')) {
      ++i;
    }
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' &&
           text[j] != '\n' && text[j] != '\r') {
      ++j;
    }
    if (j > i) detail::split_chunk(text.substr(i, j - i), tokens);
    i = j;
  }
  return tokens;
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

// Prepends START and keeps the raw string. Feeding normalized output back in
// is a contract violation; the duplicate-START check catches it.
inline TokenizedSentence normalize(std::vector<std::string> tokens,
                                   std::string raw = {}) {
  if (!tokens.empty() && tokens.front() == kStart) {
    throw InvalidInputError("normalize: input already starts with " +
                            std::string(kStart));
  }
  TokenizedSentence s;
  s.raw = std::move(raw);
  s.tokens.reserve(tokens.size() + 1);
  s.tokens.emplace_back(kStart);
  for (auto& t : tokens) s.tokens.push_back(std::move(t));
  return s;
}

inline TokenizedSentence tokenize_and_normalize(const std::string& text) {
  return normalize(tokenize(text), text);
}

}  // namespace endstyle
