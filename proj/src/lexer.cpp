#include "palm/lexer.hpp"

#include <array>
#include <cctype>

#include "palm/errors.hpp"

namespace palm {

std::string Token::describe() const {
  switch (kind) {
    case Kind::End: return "end of input";
    case Kind::String: return "string literal";
    case Kind::Char: return "char literal";
    default: return "'" + text + "'";
  }
}

namespace {

constexpr std::array<std::string_view, 13> kMultiCharPunct = {
    "&&", "||", "==", "!=", "<=", ">=", "++", "--", "+=", "-=", "*=", "/=", "%="};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skipTrivia();
      Token t;
      t.pos = {line_, col_};
      if (at_ >= src_.size()) {
        t.kind = Token::Kind::End;
        out.push_back(std::move(t));
        return out;
      }
      char c = src_[at_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Token::Kind::Ident;
        while (at_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[at_])) || src_[at_] == '_')) {
          t.text += advance();
        }
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        lexNumber(t);
      } else if (c == '"') {
        lexString(t);
      } else if (c == '\'') {
        lexChar(t);
      } else {
        lexPunct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return at_ + ahead < src_.size() ? src_[at_ + ahead] : '\0';
  }

  char advance() {
    char c = src_[at_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  [[noreturn]] void fail(const std::string& expected, const std::string& found) const {
    throw SyntaxError({line_, col_}, {expected}, found);
  }

  void skipTrivia() {
    while (at_ < src_.size()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (at_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        advance();
        advance();
        while (at_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (at_ >= src_.size()) fail("'*/'", "end of input");
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  void lexNumber(Token& t) {
    t.kind = Token::Kind::Int;
    while (std::isdigit(static_cast<unsigned char>(peek()))) t.text += advance();
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      t.kind = Token::Kind::Double;
      t.text += advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) t.text += advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = 1;
      if (peek(1) == '+' || peek(1) == '-') save = 2;
      if (std::isdigit(static_cast<unsigned char>(peek(save)))) {
        t.kind = Token::Kind::Double;
        for (std::size_t i = 0; i < save; ++i) t.text += advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) t.text += advance();
      }
    }
    if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_') {
      fail("number", "'" + t.text + peek() + "'");
    }
  }

  char escape() {
    char e = advance();
    switch (e) {
      case 'n': return '\n';
      case 't': return '\t';
      case 'r': return '\r';
      case '0': return '\0';
      case '\\': return '\\';
      case '"': return '"';
      case '\'': return '\'';
      default: fail("escape sequence", std::string("'\\") + e + "'");
    }
  }

  void lexString(Token& t) {
    t.kind = Token::Kind::String;
    t.text += advance();
    while (true) {
      if (at_ >= src_.size() || peek() == '\n') fail("closing '\"'", "end of line");
      char c = advance();
      t.text += c;
      if (c == '"') return;
      if (c == '\\') {
        char before = peek();
        t.decoded += escape();
        t.text += before;
      } else {
        t.decoded += c;
      }
    }
  }

  void lexChar(Token& t) {
    t.kind = Token::Kind::Char;
    t.text += advance();
    if (at_ >= src_.size() || peek() == '\'' || peek() == '\n') fail("character", "empty char literal");
    char c = advance();
    t.text += c;
    if (c == '\\') {
      char before = peek();
      t.decoded += escape();
      t.text += before;
    } else {
      t.decoded += c;
    }
    if (peek() != '\'') fail("closing \"'\"", std::string("'") + peek() + "'");
    t.text += advance();
  }

  void lexPunct(Token& t) {
    t.kind = Token::Kind::Punct;
    for (auto p : kMultiCharPunct) {
      if (src_.substr(at_, p.size()) == p) {
        for (std::size_t i = 0; i < p.size(); ++i) t.text += advance();
        return;
      }
    }
    char c = peek();
    static constexpr std::string_view kSingles = "+-*/%<>=!(){}[];,.";
    if (kSingles.find(c) == std::string_view::npos) {
      fail("token", std::string("'") + c + "'");
    }
    t.text += advance();
  }

  std::string_view src_;
  std::size_t at_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace palm
