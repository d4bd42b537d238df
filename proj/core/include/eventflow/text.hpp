#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace eventflow::text {

/// Tokenizer proxy used for summary budgets: every CJK character is one
/// token, every other maximal run of non-whitespace characters is one token.
std::size_t count_tokens(std::string_view utf8);

/// Longest prefix of `utf8` holding at most `budget` tokens, with trailing
/// whitespace removed.
std::string truncate_tokens(std::string_view utf8, std::size_t budget);

/// NFC normalization followed by full Unicode case folding, trimmed.
std::string fold(std::string_view utf8);

/// Folded word tokens: alphanumeric runs become one token each, CJK
/// characters become one token each, everything else separates tokens.
std::vector<std::string> word_tokens(std::string_view utf8);

std::string trim(std::string_view s);

}  // namespace eventflow::text
