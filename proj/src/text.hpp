#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace treeknap::text {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

struct Line {
  std::size_t number;  // 1-based
  std::vector<Token> tokens;
  std::size_t end_column;
};

// Splits into whitespace-separated tokens, dropping '#' comments and lines
// that end up empty.
std::vector<Line> tokenize(std::string_view text);

std::int64_t parse_int(const Token& token, std::size_t line);

}  // namespace treeknap::text
