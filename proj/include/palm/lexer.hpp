#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "palm/ast.hpp"

namespace palm {

struct Token {
  enum class Kind { Ident, Int, Double, String, Char, Punct, End };

  Kind kind = Kind::End;
  std::string text;    // identifier/punctuation spelling, or raw literal digits
  std::string decoded; // decoded string/char literal contents
  SourcePos pos;

  bool isPunct(std::string_view p) const { return kind == Kind::Punct && text == p; }
  bool isIdent(std::string_view word) const { return kind == Kind::Ident && text == word; }
  std::string describe() const;
};

/// Splits PALM-J source into tokens. `//` and `/* */` comments are skipped.
/// Throws SyntaxError on malformed literals or unknown characters.
std::vector<Token> tokenize(std::string_view source);

}  // namespace palm
