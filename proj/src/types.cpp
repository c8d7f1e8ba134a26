#include "simulmt/types.hpp"

#include <cctype>
#include <sstream>

namespace simulmt {

void check_token(const Token& t) {
  if (t.empty()) throw TokenError("empty token");
  for (unsigned char c : t) {
    if (std::isspace(c)) throw TokenError("token contains whitespace: '" + t + "'");
  }
  if (is_eos(t) || is_pad(t)) throw TokenError("token uses reserved sentinel: '" + t + "'");
}

void check_sentence(const Sentence& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (is_eos(s[i]) && i + 1 != s.size())
      throw TokenError("EOS not in final position");
  }
}

std::string join_tokens(const Sentence& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ' ';
    out += s[i];
  }
  return out;
}

Sentence split_tokens(const std::string& line) {
  Sentence out;
  std::istringstream in(line);
  for (Token t; in >> t;) out.push_back(t);
  return out;
}

}  // namespace simulmt
