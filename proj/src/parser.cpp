#include "palm/parser.hpp"

#include <charconv>
#include <set>

#include "palm/errors.hpp"
#include "palm/lexer.hpp"

namespace palm {

namespace {

const std::set<std::string, std::less<>> kReserved = {
    "int",  "double", "boolean", "char", "String", "void",  "if",  "else",
    "while", "do",    "for",     "return", "true", "false", "new", "Math"};

bool isTypeKeyword(const Token& t) {
  return t.kind == Token::Kind::Ident &&
         (t.text == "int" || t.text == "double" || t.text == "boolean" || t.text == "char" ||
          t.text == "String");
}

SubjectType::Kind kindOf(const std::string& word) {
  if (word == "int") return SubjectType::Kind::Int;
  if (word == "double") return SubjectType::Kind::Double;
  if (word == "boolean") return SubjectType::Kind::Boolean;
  if (word == "char") return SubjectType::Kind::Char;
  if (word == "String") return SubjectType::Kind::String;
  return SubjectType::Kind::Void;
}

class Parser {
 public:
  explicit Parser(std::string_view source) : toks_(tokenize(source)) {}

  SubjectProgram program(std::string_view source) {
    SubjectProgram prog;
    prog.sourceText = std::string(source);
    while (peek().kind != Token::Kind::End) {
      SourcePos pos = peek().pos;
      SubjectType type;
      if (peek().isIdent("void")) {
        next();
        type = SubjectType::scalar(SubjectType::Kind::Void);
      } else {
        type = parseType();
      }
      std::string name = expectIdent();
      if (peek().isPunct("(")) {
        prog.functions.push_back(function(pos, type, std::move(name)));
      } else {
        if (type.isVoid()) fail({"'('"});
        FieldDecl field;
        field.pos = pos;
        field.type = type;
        field.name = std::move(name);
        if (accept("=")) field.init = initializer(type);
        expect(";");
        field.id = newId();
        prog.fields.push_back(std::move(field));
      }
    }
    return prog;
  }

  ExprPtr standaloneExpression() {
    ExprPtr e = expression();
    if (peek().kind != Token::Kind::End) fail({"end of input"});
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(at_ + ahead, toks_.size() - 1);
    return toks_[i];
  }

  const Token& next() {
    const Token& t = toks_[at_];
    if (at_ + 1 < toks_.size()) ++at_;
    return t;
  }

  bool accept(std::string_view punct) {
    if (peek().isPunct(punct)) {
      next();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw SyntaxError(peek().pos, std::move(expected), peek().describe());
  }

  void expect(std::string_view punct) {
    if (!accept(punct)) fail({"'" + std::string(punct) + "'"});
  }

  void expectKeyword(std::string_view word) {
    if (!peek().isIdent(word)) fail({"'" + std::string(word) + "'"});
    next();
  }

  std::string expectIdent() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident || kReserved.count(t.text) > 0) fail({"identifier"});
    return next().text;
  }

  NodeId newId() { return nextId_++; }

  ExprPtr mk(Expr::Node node, SourcePos pos) { return makeExpr(std::move(node), newId(), pos); }
  StmtPtr mk(Stmt::Node node, SourcePos pos) { return makeStmt(std::move(node), newId(), pos); }

  SubjectType parseType() {
    if (!isTypeKeyword(peek())) fail({"type"});
    SubjectType type = SubjectType::scalar(kindOf(next().text));
    if (peek().isPunct("[") && peek(1).isPunct("]")) {
      next();
      next();
      type.isArray = true;
    }
    return type;
  }

  FunctionDecl function(SourcePos pos, SubjectType returnType, std::string name) {
    FunctionDecl fn;
    fn.pos = pos;
    fn.name = std::move(name);
    fn.returnType = returnType;
    expect("(");
    if (!peek().isPunct(")")) {
      do {
        SubjectType t = parseType();
        fn.params.push_back({expectIdent(), t});
      } while (accept(","));
    }
    expect(")");
    fn.firstNode = nextId_;
    if (!peek().isPunct("{")) fail({"'{'"});
    fn.body = block();
    fn.id = newId();
    fn.lastNode = fn.id;
    return fn;
  }

  StmtPtr block() {
    SourcePos pos = peek().pos;
    expect("{");
    BlockStmt b;
    while (!peek().isPunct("}")) {
      if (peek().kind == Token::Kind::End) fail({"'}'"});
      b.stmts.push_back(statement());
    }
    next();
    return mk(std::move(b), pos);
  }

  StmtPtr statement() {
    const Token& t = peek();
    SourcePos pos = t.pos;
    if (t.isPunct("{")) return block();
    if (t.isIdent("if")) {
      next();
      expect("(");
      ExprPtr cond = expression();
      expect(")");
      StmtPtr thenBranch = statement();
      StmtPtr elseBranch;
      if (peek().isIdent("else")) {
        next();
        elseBranch = statement();
      }
      return mk(IfStmt{cond, thenBranch, elseBranch}, pos);
    }
    if (t.isIdent("while")) {
      next();
      expect("(");
      ExprPtr cond = expression();
      expect(")");
      StmtPtr body = statement();
      return mk(WhileStmt{cond, body}, pos);
    }
    if (t.isIdent("do")) {
      next();
      StmtPtr body = statement();
      expectKeyword("while");
      expect("(");
      ExprPtr cond = expression();
      expect(")");
      expect(";");
      return mk(DoWhileStmt{body, cond}, pos);
    }
    if (t.isIdent("for")) {
      next();
      expect("(");
      StmtPtr init;
      if (!peek().isPunct(";")) init = simpleStatement();
      expect(";");
      ExprPtr cond;
      if (peek().isPunct(";")) {
        cond = mk(BoolLit{true}, peek().pos);
      } else {
        cond = expression();
      }
      expect(";");
      StmtPtr update;
      if (!peek().isPunct(")")) {
        update = simpleStatement();
        if (update->is<DeclStmt>()) throw SyntaxError(update->pos, {"assignment or call"}, "declaration");
      }
      expect(")");
      StmtPtr body = statement();
      return mk(ForStmt{init, cond, update, body}, pos);
    }
    if (t.isIdent("return")) {
      next();
      ExprPtr value;
      if (!peek().isPunct(";")) value = expression();
      expect(";");
      return mk(ReturnStmt{value}, pos);
    }
    if (t.isIdent("else")) fail({"statement"});
    StmtPtr s = simpleStatement();
    expect(";");
    return s;
  }

  ExprPtr initializer(SubjectType type) {
    if (type.isArray && peek().isPunct("{")) {
      SourcePos pos = peek().pos;
      auto elements = arrayElements();
      return mk(NewArray{type.element(), nullptr, std::move(elements), true}, pos);
    }
    return expression();
  }

  std::vector<ExprPtr> arrayElements() {
    expect("{");
    std::vector<ExprPtr> elements;
    if (!peek().isPunct("}")) {
      do {
        elements.push_back(expression());
      } while (accept(","));
    }
    expect("}");
    return elements;
  }

  // Rebuilds an assignment target with fresh ids in parse order.
  ExprPtr cloneTarget(const ExprPtr& e) {
    if (const auto* v = e->as<VarRef>()) return mk(*v, e->pos);
    const auto& ix = std::get<Index>(e->node);
    ExprPtr array = cloneTarget(ix.array);
    ExprPtr index = cloneExpr(ix.index);
    return mk(Index{array, index}, e->pos);
  }

  ExprPtr cloneExpr(const ExprPtr& e) {
    return std::visit(
        [&](const auto& n) -> ExprPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Unary>) {
            ExprPtr o = cloneExpr(n.operand);
            return mk(Unary{n.op, o}, e->pos);
          } else if constexpr (std::is_same_v<T, Binary>) {
            ExprPtr l = cloneExpr(n.lhs);
            ExprPtr r = cloneExpr(n.rhs);
            return mk(Binary{n.op, l, r}, e->pos);
          } else if constexpr (std::is_same_v<T, Call>) {
            Call c{n.callee, {}};
            for (const auto& a : n.args) c.args.push_back(cloneExpr(a));
            return mk(std::move(c), e->pos);
          } else if constexpr (std::is_same_v<T, MethodCall>) {
            MethodCall c{cloneExpr(n.receiver), n.method, {}};
            for (const auto& a : n.args) c.args.push_back(cloneExpr(a));
            return mk(std::move(c), e->pos);
          } else if constexpr (std::is_same_v<T, Index>) {
            ExprPtr a = cloneExpr(n.array);
            ExprPtr i = cloneExpr(n.index);
            return mk(Index{a, i}, e->pos);
          } else if constexpr (std::is_same_v<T, ArrayLen>) {
            return mk(ArrayLen{cloneExpr(n.array)}, e->pos);
          } else if constexpr (std::is_same_v<T, NewArray>) {
            NewArray c{n.elementType, n.size ? cloneExpr(n.size) : nullptr, {}, n.hasInitializer};
            for (const auto& a : n.elements) c.elements.push_back(cloneExpr(a));
            return mk(std::move(c), e->pos);
          } else {
            return mk(n, e->pos);
          }
        },
        e->node);
  }

  void checkTarget(const ExprPtr& e) {
    if (e->is<VarRef>()) return;
    if (const auto* ix = e->as<Index>()) {
      checkTarget(ix->array);
      return;
    }
    throw SyntaxError(e->pos, {"assignable expression"}, "expression");
  }

  StmtPtr desugaredUpdate(const ExprPtr& target, BinaryOp op, ExprPtr value, SourcePos pos) {
    return mk(AssignStmt{target, mk(Binary{op, cloneTarget(target), std::move(value)}, pos)}, pos);
  }

  /// Declaration, assignment, increment or call; no trailing ';'.
  StmtPtr simpleStatement() {
    SourcePos pos = peek().pos;
    if (isTypeKeyword(peek())) {
      SubjectType type = parseType();
      std::string name = expectIdent();
      ExprPtr init;
      if (accept("=")) init = initializer(type);
      return mk(DeclStmt{type, std::move(name), init}, pos);
    }
    if (peek().isPunct("++") || peek().isPunct("--")) {
      BinaryOp op = next().text == "++" ? BinaryOp::Add : BinaryOp::Sub;
      ExprPtr target = postfix();
      checkTarget(target);
      ExprPtr copy = cloneTarget(target);
      ExprPtr one = mk(IntLit{1}, pos);
      ExprPtr value = mk(Binary{op, copy, one}, pos);
      return mk(AssignStmt{target, value}, pos);
    }
    ExprPtr e = expression();
    if (accept("=")) {
      checkTarget(e);
      ExprPtr value = expression();
      return mk(AssignStmt{e, value}, pos);
    }
    static const std::pair<std::string_view, BinaryOp> kCompound[] = {
        {"+=", BinaryOp::Add}, {"-=", BinaryOp::Sub}, {"*=", BinaryOp::Mul},
        {"/=", BinaryOp::Div}, {"%=", BinaryOp::Mod}};
    for (const auto& [spell, op] : kCompound) {
      if (peek().isPunct(spell)) {
        next();
        checkTarget(e);
        ExprPtr copy = cloneTarget(e);
        ExprPtr value = expression();
        ExprPtr combined = mk(Binary{op, copy, value}, pos);
        return mk(AssignStmt{e, combined}, pos);
      }
    }
    if (peek().isPunct("++") || peek().isPunct("--")) {
      BinaryOp op = next().text == "++" ? BinaryOp::Add : BinaryOp::Sub;
      checkTarget(e);
      ExprPtr copy = cloneTarget(e);
      ExprPtr one = mk(IntLit{1}, pos);
      ExprPtr value = mk(Binary{op, copy, one}, pos);
      return mk(AssignStmt{e, value}, pos);
    }
    if (!e->is<Call>() && !e->is<MethodCall>()) {
      throw SyntaxError(e->pos, {"'='", "call statement"}, "expression");
    }
    return mk(ExprStmt{e}, pos);
  }

  // Expression grammar, lowest precedence first.

  ExprPtr expression() { return orExpr(); }

  ExprPtr binaryLevel(ExprPtr (Parser::*sub)(),
                      std::initializer_list<std::pair<std::string_view, BinaryOp>> ops) {
    ExprPtr lhs = (this->*sub)();
    while (true) {
      bool matched = false;
      for (const auto& [spell, op] : ops) {
        if (peek().isPunct(spell)) {
          SourcePos pos = next().pos;
          ExprPtr rhs = (this->*sub)();
          lhs = mk(Binary{op, lhs, rhs}, pos);
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
    }
  }

  ExprPtr orExpr() { return binaryLevel(&Parser::andExpr, {{"||", BinaryOp::Or}}); }
  ExprPtr andExpr() { return binaryLevel(&Parser::equality, {{"&&", BinaryOp::And}}); }
  ExprPtr equality() {
    return binaryLevel(&Parser::relational, {{"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}});
  }
  ExprPtr relational() {
    return binaryLevel(&Parser::additive, {{"<=", BinaryOp::Le},
                                           {">=", BinaryOp::Ge},
                                           {"<", BinaryOp::Lt},
                                           {">", BinaryOp::Gt}});
  }
  ExprPtr additive() {
    return binaryLevel(&Parser::multiplicative, {{"+", BinaryOp::Add}, {"-", BinaryOp::Sub}});
  }
  ExprPtr multiplicative() {
    return binaryLevel(&Parser::unary,
                       {{"*", BinaryOp::Mul}, {"/", BinaryOp::Div}, {"%", BinaryOp::Mod}});
  }

  ExprPtr unary() {
    SourcePos pos = peek().pos;
    if (peek().isPunct("-")) {
      next();
      if (peek().kind == Token::Kind::Int || peek().kind == Token::Kind::Double) {
        return postfixFrom(numberLiteral(true));
      }
      ExprPtr operand = unary();
      return mk(Unary{UnaryOp::Neg, operand}, pos);
    }
    if (peek().isPunct("!")) {
      next();
      ExprPtr operand = unary();
      return mk(Unary{UnaryOp::Not, operand}, pos);
    }
    return postfix();
  }

  ExprPtr numberLiteral(bool negative) {
    const Token& t = next();
    if (t.kind == Token::Kind::Double) {
      double v = 0;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec != std::errc()) throw SyntaxError(t.pos, {"double literal"}, t.text);
      return mk(DoubleLit{negative ? -v : v}, t.pos);
    }
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    constexpr std::uint64_t kLimit = std::uint64_t{1} << 63;
    if (ec != std::errc() || v > kLimit || (v == kLimit && !negative)) {
      throw SyntaxError(t.pos, {"64-bit int literal"}, t.text);
    }
    auto value = static_cast<std::int64_t>(negative ? (~v + 1) : v);
    return mk(IntLit{value}, t.pos);
  }

  ExprPtr postfix() { return postfixFrom(primary()); }

  ExprPtr postfixFrom(ExprPtr e) {
    while (true) {
      SourcePos pos = peek().pos;
      if (accept("[")) {
        ExprPtr index = expression();
        expect("]");
        e = mk(Index{e, index}, pos);
      } else if (accept(".")) {
        std::string name = expectIdent();
        if (name == "length" && !peek().isPunct("(")) {
          e = mk(ArrayLen{e}, pos);
        } else {
          auto args = arguments();
          e = mk(MethodCall{e, std::move(name), std::move(args)}, pos);
        }
      } else {
        return e;
      }
    }
  }

  std::vector<ExprPtr> arguments() {
    expect("(");
    std::vector<ExprPtr> args;
    if (!peek().isPunct(")")) {
      do {
        args.push_back(expression());
      } while (accept(","));
    }
    expect(")");
    return args;
  }

  ExprPtr primary() {
    const Token& t = peek();
    SourcePos pos = t.pos;
    switch (t.kind) {
      case Token::Kind::Int:
      case Token::Kind::Double:
        return numberLiteral(false);
      case Token::Kind::String: {
        std::string value = next().decoded;
        return mk(StringLit{std::move(value)}, pos);
      }
      case Token::Kind::Char: {
        auto code = static_cast<std::uint8_t>(next().decoded.at(0));
        return mk(CharLit{Char{code}}, pos);
      }
      case Token::Kind::Punct:
        if (accept("(")) {
          ExprPtr e = expression();
          expect(")");
          return e;
        }
        break;
      case Token::Kind::Ident:
        if (t.text == "true" || t.text == "false") {
          bool v = next().text == "true";
          return mk(BoolLit{v}, pos);
        }
        if (t.text == "new") {
          next();
          if (!isTypeKeyword(peek())) fail({"element type"});
          SubjectType elem = SubjectType::scalar(kindOf(next().text));
          expect("[");
          if (accept("]")) {
            auto elements = arrayElements();
            return mk(NewArray{elem, nullptr, std::move(elements), true}, pos);
          }
          ExprPtr size = expression();
          expect("]");
          return mk(NewArray{elem, size, {}, false}, pos);
        }
        if (t.text == "Math" && peek(1).isPunct(".")) {
          next();
          next();
          std::string name = expectIdent();
          auto args = arguments();
          return mk(Call{std::move(name), std::move(args)}, pos);
        }
        if (kReserved.count(t.text) == 0) {
          std::string name = next().text;
          if (peek().isPunct("(")) {
            auto args = arguments();
            return mk(Call{std::move(name), std::move(args)}, pos);
          }
          return mk(VarRef{std::move(name)}, pos);
        }
        break;
      case Token::Kind::End:
        break;
    }
    fail({"expression"});
  }

  std::vector<Token> toks_;
  std::size_t at_ = 0;
  NodeId nextId_ = 1;
};

}  // namespace

SubjectProgram parseUnresolved(std::string_view source) {
  Parser p(source);
  return p.program(source);
}

SubjectProgram parse(std::string_view source) {
  SubjectProgram prog = parseUnresolved(source);
  resolve(prog);
  return prog;
}

ExprPtr parseExpression(std::string_view source) {
  Parser p(source);
  return p.standaloneExpression();
}

}  // namespace palm
