#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace simulmt {

// Tokens are whitespace-free UTF-8 strings. Two surface forms are reserved
// as sentinels and never appear in corpus text or displayed output.
using Token = std::string;
using Sentence = std::vector<Token>;

inline const Token kEos = "</s>";
inline const Token kPad = "<pad>";

inline bool is_eos(const Token& t) { return t == kEos; }
inline bool is_pad(const Token& t) { return t == kPad; }

struct TokenError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Checks the corpus-token contract: non-empty, no whitespace, not a sentinel.
void check_token(const Token& t);

// A sentence may carry EOS, but only as its final element.
void check_sentence(const Sentence& s);

// True when the sentence's final element is the EOS sentinel.
inline bool ends_with_eos(const Sentence& s) {
  return !s.empty() && is_eos(s.back());
}

// Content length, not counting a terminal EOS.
inline std::size_t content_size(const Sentence& s) {
  return s.size() - (ends_with_eos(s) ? 1 : 0);
}

std::string join_tokens(const Sentence& s);
Sentence split_tokens(const std::string& line);

}  // namespace simulmt
