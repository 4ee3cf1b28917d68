#include "foodquiz/tokenizer.hpp"

#include <cctype>

namespace foodquiz {

namespace {

bool is_edge_punct(char c) {
  auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (start == i) break;

    std::string tok(text.substr(start, i - start));
    for (char& c : tok) {
      auto u = static_cast<unsigned char>(c);
      if (u < 0x80) c = static_cast<char>(std::tolower(u));
    }
    // Leading '#' and '@' survive edge stripping: they decide the token type.
    std::size_t b = 0, e = tok.size();
    while (b < e && is_edge_punct(tok[b]) && tok[b] != '#' && tok[b] != '@') ++b;
    while (e > b && is_edge_punct(tok[e - 1])) --e;
    tok = tok.substr(b, e - b);

    if (tok.empty() || tok.front() == '@') continue;
    if (starts_with(tok, "http://") || starts_with(tok, "https://") ||
        starts_with(tok, "www.")) {
      continue;
    }
    if (tok == "#") continue;
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

}  // namespace foodquiz
