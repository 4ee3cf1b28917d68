#ifndef FOODQUIZ_TOKENIZER_HPP_
#define FOODQUIZ_TOKENIZER_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace foodquiz {

/// Splits a post into lowercase tokens. Hashtags keep their leading '#'.
/// URLs and @-mentions are dropped; punctuation is stripped from token
/// edges, and tokens that become empty are dropped. Bytes >= 0x80 are
/// treated as word characters so UTF-8 text passes through unchanged.
std::vector<std::string> tokenize(std::string_view text);

inline bool is_hashtag(std::string_view token) {
  return token.size() > 1 && token.front() == '#';
}

}  // namespace foodquiz

#endif  // FOODQUIZ_TOKENIZER_HPP_
