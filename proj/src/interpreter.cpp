#include "palm/interpreter.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>

#include "palm/builtins.hpp"
#include "palm/lexer.hpp"
#include "palm/printer.hpp"

namespace palm {

std::string TestCase::text() const {
  std::string out = entry + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i > 0) out += ", ";
    out += formatValue(args[i]);
  }
  return out + ")";
}

namespace {

using K = SubjectType::Kind;

Value coerce(SubjectType type, Value v) {
  if (type.isArray) return v;
  if (type.kind == K::Double) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (const auto* c = std::get_if<Char>(&v)) return static_cast<double>(c->code);
  }
  if (type.kind == K::Int) {
    if (const auto* c = std::get_if<Char>(&v)) return std::int64_t{c->code};
  }
  return v;
}

class LiteralParser {
 public:
  explicit LiteralParser(std::string_view text) : toks_(tokenize(text)) {}

  const Token& peek() const { return toks_[at_]; }
  const Token& next() {
    const Token& t = toks_[at_];
    if (at_ + 1 < toks_.size()) ++at_;
    return t;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    throw TestParseError("test parse error at " + toString(peek().pos) + ": expected " + expected +
                         " but found " + peek().describe());
  }

  void expect(std::string_view p) {
    if (!peek().isPunct(p)) fail("'" + std::string(p) + "'");
    next();
  }

  Value literal(SubjectType type) {
    if (type.isArray) {
      expect("{");
      auto array = std::make_shared<Array>();
      array->elementType = type.element();
      if (!peek().isPunct("}")) {
        do {
          array->items.push_back(literal(type.element()));
        } while (peek().isPunct(",") && (next(), true));
      }
      expect("}");
      return array;
    }
    const Token& t = peek();
    switch (type.kind) {
      case K::Int:
      case K::Double: {
        bool negative = false;
        if (t.isPunct("-")) {
          next();
          negative = true;
        }
        const Token& n = peek();
        if (n.kind == Token::Kind::Int) {
          next();
          std::uint64_t v = 0;
          try {
            v = std::stoull(n.text);
          } catch (const std::exception&) {
            throw TestParseError("integer literal out of range: " + n.text);
          }
          constexpr std::uint64_t kLimit = std::uint64_t{1} << 63;
          if (v > kLimit || (v == kLimit && !negative)) throw TestParseError("integer literal out of range: " + n.text);
          auto i = static_cast<std::int64_t>(negative ? ~v + 1 : v);
          if (type.kind == K::Double) return static_cast<double>(i);
          return i;
        }
        if (n.kind == Token::Kind::Double && type.kind == K::Double) {
          next();
          double d = std::stod(n.text);
          return negative ? -d : d;
        }
        fail(type.kind == K::Int ? "int literal" : "double literal");
      }
      case K::Boolean:
        if (t.isIdent("true") || t.isIdent("false")) return next().text == "true";
        fail("boolean literal");
      case K::Char:
        if (t.kind == Token::Kind::Char) return Char{static_cast<std::uint8_t>(next().decoded.at(0))};
        fail("char literal");
      case K::String:
        if (t.kind == Token::Kind::String) return next().decoded;
        fail("string literal");
      case K::Void:
        break;
    }
    fail("literal");
  }

 private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;
};

// Internal control-flow signals.
struct Fault {
  std::string kind;
  SourcePos pos;
};
struct StepLimit {};
struct AssertFail {
  std::size_t index;
};

constexpr int kMaxCallDepth = 1000;

class Machine {
 public:
  Machine(const SubjectProgram& program, const ExecOptions& options, ExecResult& result, bool recordLines)
      : program_(program), options_(options), result_(result), recordLines_(recordLines) {}

  void initFields() {
    Frame frame{nullptr, false, {}};
    frames_.push_back(&frame);
    for (const auto& f : program_.fields) {
      globals_[f.name] = f.init ? coerce(f.type, eval(*f.init)) : defaultValue(f.type);
    }
    frames_.pop_back();
  }

  Value callEntry(const FunctionDecl& fn, const std::vector<Value>& args) {
    std::vector<Value> copies;
    for (const auto& a : args) copies.push_back(deepCopy(a));
    return call(fn, copies, kSyntheticNode, true, fn.pos);
  }

  /// Executes variant steps in a single frame holding the entry parameters.
  Value runSteps(const PathVariant& v, const std::vector<Value>& args) {
    Frame frame{nullptr, false, {}};
    for (std::size_t i = 0; i < v.params.size(); ++i) frame.locals[v.params[i].name] = coerce(v.params[i].type, deepCopy(args[i]));
    frames_.push_back(&frame);
    for (std::size_t i = 0; i < v.steps.size(); ++i) {
      const Stmt& s = *v.steps[i].stmt;
      if (const auto* a = s.as<AssertStmt>()) {
        tick();
        if (truth(eval(*a->cond)) != a->expected) throw AssertFail{i};
        continue;
      }
      if (auto ret = exec(s)) {
        frames_.pop_back();
        return *ret;
      }
    }
    frames_.pop_back();
    return std::monostate{};
  }

 private:
  struct Frame {
    const FunctionDecl* fn;
    bool inContext;
    std::map<std::string, Value> locals;
  };

  void tick() {
    if (++steps_ > options_.stepLimit) throw StepLimit{};
  }

  void line(SourcePos pos) {
    if (recordLines_) result_.linesExecuted.insert(pos.line);
  }

  Frame& frame() { return *frames_.back(); }

  Value& variable(const std::string& name, SourcePos pos) {
    auto& locals = frame().locals;
    auto it = locals.find(name);
    if (it != locals.end()) return it->second;
    auto g = globals_.find(name);
    if (g != globals_.end()) return g->second;
    throw PalmError("unbound variable '" + name + "' at " + toString(pos));
  }

  static bool truth(const Value& v) { return std::get<bool>(v); }

  Value call(const FunctionDecl& fn, const std::vector<Value>& args, NodeId site, bool entry, SourcePos pos) {
    tick();
    if (frames_.size() >= kMaxCallDepth) throw Fault{"call-depth-exceeded", pos};
    bool callerInContext = entry || (!frames_.empty() && frame().inContext);
    bool inContext = entry || (callerInContext && options_.inlinedCallSites.count(site) > 0);
    Frame f{&fn, inContext, {}};
    for (std::size_t i = 0; i < fn.params.size(); ++i) f.locals[fn.params[i].name] = coerce(fn.params[i].type, args[i]);
    if (inContext) {
      int depth = contextDepth_[fn.name]++;
      result_.stats.maxRecursionDepth = std::max(result_.stats.maxRecursionDepth, depth);
    }
    frames_.push_back(&f);
    std::optional<Value> ret = exec(*fn.body);
    frames_.pop_back();
    if (inContext) --contextDepth_[fn.name];
    if (!ret) {
      if (!fn.returnType.isVoid()) throw Fault{"missing-return", fn.pos};
      return std::monostate{};
    }
    return coerce(fn.returnType, std::move(*ret));
  }

  void assign(const Expr& target, Value v) {
    if (const auto* r = target.as<VarRef>()) {
      Value& slot = variable(r->name, target.pos);
      if (std::holds_alternative<double>(slot)) v = coerce(SubjectType::scalar(K::Double), std::move(v));
      if (std::holds_alternative<std::int64_t>(slot)) v = coerce(SubjectType::scalar(K::Int), std::move(v));
      slot = std::move(v);
      return;
    }
    const auto& ix = std::get<Index>(target.node);
    Value array = eval(*ix.array);
    std::int64_t i = asInt(eval(*ix.index));
    Array& a = checkedArray(array, target.pos);
    if (i < 0 || i >= static_cast<std::int64_t>(a.items.size())) throw Fault{"index-out-of-bounds", target.pos};
    a.items[static_cast<std::size_t>(i)] = coerce(a.elementType, std::move(v));
  }

  static Array& checkedArray(const Value& v, SourcePos pos) {
    const auto& ref = std::get<ArrayRef>(v);
    if (!ref) throw Fault{"null-array", pos};
    return *ref;
  }

  void branch(const Expr& cond, bool outcome) {
    result_.trace.push_back({cond.id, outcome, frame().inContext});
    line(cond.pos);
  }

  bool condition(const Expr& cond) {
    bool b = truth(eval(cond));
    branch(cond, b);
    return b;
  }

  std::optional<Value> loop(const Expr& cond, const std::vector<const Stmt*>& body, bool testFirst) {
    int iterations = 0;
    while (true) {
      if (testFirst && !condition(cond)) break;
      testFirst = true;
      tick();
      ++iterations;
      if (frame().inContext) result_.stats.maxLoopIterations = std::max(result_.stats.maxLoopIterations, iterations);
      for (const Stmt* s : body) {
        if (auto ret = exec(*s)) return ret;
      }
    }
    return std::nullopt;
  }

  std::optional<Value> exec(const Stmt& s) {
    tick();
    if (!s.is<BlockStmt>()) line(s.pos);
    return std::visit(
        [&](const auto& n) -> std::optional<Value> {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, DeclStmt>) {
            frame().locals[n.name] = n.init ? coerce(n.type, eval(*n.init)) : defaultValue(n.type);
          } else if constexpr (std::is_same_v<T, AssignStmt>) {
            // The target's array and index are evaluated before the value.
            if (const auto* ix = n.target->template as<Index>()) {
              Value array = eval(*ix->array);
              std::int64_t i = asInt(eval(*ix->index));
              Value v = eval(*n.value);
              Array& a = checkedArray(array, n.target->pos);
              if (i < 0 || i >= static_cast<std::int64_t>(a.items.size())) {
                throw Fault{"index-out-of-bounds", n.target->pos};
              }
              a.items[static_cast<std::size_t>(i)] = coerce(a.elementType, std::move(v));
            } else {
              assign(*n.target, eval(*n.value));
            }
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            if (condition(*n.cond)) return exec(*n.thenBranch);
            if (n.elseBranch) return exec(*n.elseBranch);
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            return loop(*n.cond, {n.body.get()}, true);
          } else if constexpr (std::is_same_v<T, DoWhileStmt>) {
            return loop(*n.cond, {n.body.get()}, false);
          } else if constexpr (std::is_same_v<T, ForStmt>) {
            if (n.init) exec(*n.init);
            std::vector<const Stmt*> body{n.body.get()};
            if (n.update) body.push_back(n.update.get());
            return loop(*n.cond, body, true);
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            return n.value ? eval(*n.value) : Value{std::monostate{}};
          } else if constexpr (std::is_same_v<T, BlockStmt>) {
            for (const auto& st : n.stmts) {
              if (auto ret = exec(*st)) return ret;
            }
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            eval(*n.expr);
          } else if constexpr (std::is_same_v<T, AssertStmt>) {
            if (truth(eval(*n.cond)) != n.expected) throw PalmError("assertion outside a variant");
          }
          return std::nullopt;
        },
        s.node);
  }

  static bool isDouble(const Value& v) { return std::holds_alternative<double>(v); }
  static bool isString(const Value& v) { return std::holds_alternative<std::string>(v); }

  Value arithmetic(BinaryOp op, const Value& l, const Value& r, SourcePos pos) {
    if (isDouble(l) || isDouble(r)) {
      double x = asDouble(l), y = asDouble(r);
      switch (op) {
        case BinaryOp::Add: return x + y;
        case BinaryOp::Sub: return x - y;
        case BinaryOp::Mul: return x * y;
        case BinaryOp::Div: return x / y;
        case BinaryOp::Mod: return std::fmod(x, y);
        default: break;
      }
    }
    std::int64_t x = asInt(l), y = asInt(r);
    auto ux = static_cast<std::uint64_t>(x), uy = static_cast<std::uint64_t>(y);
    switch (op) {
      case BinaryOp::Add: return static_cast<std::int64_t>(ux + uy);
      case BinaryOp::Sub: return static_cast<std::int64_t>(ux - uy);
      case BinaryOp::Mul: return static_cast<std::int64_t>(ux * uy);
      case BinaryOp::Div:
        if (y == 0) throw Fault{"divide-by-zero", pos};
        if (y == -1) return static_cast<std::int64_t>(0 - ux);
        return x / y;
      case BinaryOp::Mod:
        if (y == 0) throw Fault{"divide-by-zero", pos};
        if (y == -1) return std::int64_t{0};
        return x % y;
      default: break;
    }
    throw PalmError("not an arithmetic operator");
  }

  static bool numericValue(const Value& v) {
    return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v) ||
           std::holds_alternative<Char>(v);
  }

  static bool equal(const Value& l, const Value& r) {
    if (numericValue(l) && numericValue(r)) {
      if (isDouble(l) || isDouble(r)) return asDouble(l) == asDouble(r);
      return asInt(l) == asInt(r);
    }
    if (const auto* a = std::get_if<ArrayRef>(&l)) return *a == std::get<ArrayRef>(r);
    return l == r;
  }

  static bool compare(BinaryOp op, const Value& l, const Value& r) {
    if (isDouble(l) || isDouble(r)) {
      double x = asDouble(l), y = asDouble(r);
      switch (op) {
        case BinaryOp::Lt: return x < y;
        case BinaryOp::Le: return x <= y;
        case BinaryOp::Gt: return x > y;
        default: return x >= y;
      }
    }
    std::int64_t x = asInt(l), y = asInt(r);
    switch (op) {
      case BinaryOp::Lt: return x < y;
      case BinaryOp::Le: return x <= y;
      case BinaryOp::Gt: return x > y;
      default: return x >= y;
    }
  }

  Value eval(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> Value {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, DoubleLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, StringLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, CharLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, VarRef>) {
            return variable(n.name, e.pos);
          } else if constexpr (std::is_same_v<T, Unary>) {
            Value v = eval(*n.operand);
            if (n.op == UnaryOp::Not) return !truth(v);
            if (isDouble(v)) return -std::get<double>(v);
            return static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(asInt(v)));
          } else if constexpr (std::is_same_v<T, Binary>) {
            return binary(n, e);
          } else if constexpr (std::is_same_v<T, Call>) {
            std::vector<Value> args;
            for (const auto& a : n.args) args.push_back(eval(*a));
            if (const FunctionDecl* fn = program_.findFunction(n.callee)) return call(*fn, args, e.id, false, e.pos);
            return freeFunction(n.callee, args);
          } else if constexpr (std::is_same_v<T, MethodCall>) {
            Value recv = eval(*n.receiver);
            std::vector<Value> args;
            for (const auto& a : n.args) args.push_back(eval(*a));
            return stringMethod(std::get<std::string>(recv), n.method, args, e.pos);
          } else if constexpr (std::is_same_v<T, Index>) {
            Value array = eval(*n.array);
            std::int64_t i = asInt(eval(*n.index));
            Array& a = checkedArray(array, e.pos);
            if (i < 0 || i >= static_cast<std::int64_t>(a.items.size())) throw Fault{"index-out-of-bounds", e.pos};
            return a.items[static_cast<std::size_t>(i)];
          } else if constexpr (std::is_same_v<T, ArrayLen>) {
            Value array = eval(*n.array);
            return static_cast<std::int64_t>(checkedArray(array, e.pos).items.size());
          } else {
            auto array = std::make_shared<Array>();
            array->elementType = n.elementType;
            if (n.hasInitializer) {
              for (const auto& el : n.elements) array->items.push_back(coerce(n.elementType, eval(*el)));
            } else {
              std::int64_t size = asInt(eval(*n.size));
              if (size < 0) throw Fault{"negative-array-size", e.pos};
              tick();
              if (static_cast<std::size_t>(size) > options_.stepLimit) throw StepLimit{};
              array->items.assign(static_cast<std::size_t>(size), defaultValue(n.elementType));
            }
            return array;
          }
        },
        e.node);
  }

  Value binary(const Binary& n, const Expr& e) {
    if (n.op == BinaryOp::And) return truth(eval(*n.lhs)) && truth(eval(*n.rhs));
    if (n.op == BinaryOp::Or) return truth(eval(*n.lhs)) || truth(eval(*n.rhs));
    Value l = eval(*n.lhs);
    Value r = eval(*n.rhs);
    switch (n.op) {
      case BinaryOp::Add:
        if (isString(l) || isString(r)) return concatText(l) + concatText(r);
        return arithmetic(n.op, l, r, e.pos);
      case BinaryOp::Sub:
      case BinaryOp::Mul:
      case BinaryOp::Div:
      case BinaryOp::Mod:
        return arithmetic(n.op, l, r, e.pos);
      case BinaryOp::Eq: return equal(l, r);
      case BinaryOp::Ne: return !equal(l, r);
      default: return compare(n.op, l, r);
    }
  }

  static Value freeFunction(const std::string& name, const std::vector<Value>& args) {
    bool dbl = std::any_of(args.begin(), args.end(), isDouble);
    if (name == "floor") return std::floor(asDouble(args[0]));
    if (name == "abs") {
      if (dbl) return std::fabs(asDouble(args[0]));
      std::int64_t x = asInt(args[0]);
      return x < 0 ? static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(x)) : x;
    }
    bool isMin = name == "min";
    if (dbl) {
      double x = asDouble(args[0]), y = asDouble(args[1]);
      if (std::isnan(x) || std::isnan(y)) return std::nan("");
      return isMin ? std::min(x, y) : std::max(x, y);
    }
    std::int64_t x = asInt(args[0]), y = asInt(args[1]);
    return isMin ? std::min(x, y) : std::max(x, y);
  }

  static std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  static std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  }

  static Value split(const std::string& s, const std::string& sep) {
    auto out = std::make_shared<Array>();
    out->elementType = SubjectType::scalar(K::String);
    if (sep.empty()) {
      if (s.empty()) {
        out->items.emplace_back(std::string());
      } else {
        for (char c : s) out->items.emplace_back(std::string(1, c));
      }
      return out;
    }
    std::vector<std::string> parts;
    std::size_t start = 0;
    bool matched = false;
    while (true) {
      std::size_t at = s.find(sep, start);
      if (at == std::string::npos) break;
      matched = true;
      parts.push_back(s.substr(start, at - start));
      start = at + sep.size();
    }
    parts.push_back(s.substr(start));
    if (matched) {
      while (!parts.empty() && parts.back().empty()) parts.pop_back();
    }
    for (auto& p : parts) out->items.emplace_back(std::move(p));
    return out;
  }

  static Value stringMethod(const std::string& s, const std::string& m, const std::vector<Value>& args,
                            SourcePos pos) {
    auto len = static_cast<std::int64_t>(s.size());
    auto str = [&](std::size_t i) -> const std::string& { return std::get<std::string>(args[i]); };
    if (m == "length") return len;
    if (m == "isEmpty") return s.empty();
    if (m == "charAt") {
      std::int64_t i = asInt(args[0]);
      if (i < 0 || i >= len) throw Fault{"index-out-of-bounds", pos};
      return Char{static_cast<std::uint8_t>(s[static_cast<std::size_t>(i)])};
    }
    if (m == "equals") return s == str(0);
    if (m == "equalsIgnoreCase") return lower(s) == lower(str(0));
    if (m == "substring") {
      std::int64_t b = asInt(args[0]);
      std::int64_t e = args.size() > 1 ? asInt(args[1]) : len;
      if (b < 0 || e < b) throw Fault{"negative-substring", pos};
      if (e > len) throw Fault{"index-out-of-bounds", pos};
      return s.substr(static_cast<std::size_t>(b), static_cast<std::size_t>(e - b));
    }
    if (m == "indexOf") {
      auto at = s.find(str(0));
      return at == std::string::npos ? std::int64_t{-1} : static_cast<std::int64_t>(at);
    }
    if (m == "split") return split(s, str(0));
    if (m == "trim") {
      std::size_t b = 0, e = s.size();
      while (b < e && static_cast<unsigned char>(s[b]) <= ' ') ++b;
      while (e > b && static_cast<unsigned char>(s[e - 1]) <= ' ') --e;
      return s.substr(b, e - b);
    }
    if (m == "toLowerCase") return lower(s);
    if (m == "toUpperCase") return upper(s);
    if (m == "startsWith") return s.rfind(str(0), 0) == 0;
    if (m == "endsWith") return s.size() >= str(0).size() && s.compare(s.size() - str(0).size(), str(0).size(), str(0)) == 0;
    if (m == "contains") return s.find(str(0)) != std::string::npos;
    throw PalmError("unknown string method '" + m + "'");
  }

  const SubjectProgram& program_;
  const ExecOptions& options_;
  ExecResult& result_;
  bool recordLines_;
  std::map<std::string, Value> globals_;
  std::vector<Frame*> frames_;
  std::map<std::string, int> contextDepth_;
  std::size_t steps_ = 0;
};

template <typename Body>
ExecResult guarded(Body&& body) {
  ExecResult r;
  try {
    body(r);
  } catch (const Fault& f) {
    r.outcome = ExecResult::Outcome::RuntimeError;
    r.errorKind = f.kind;
    r.errorPos = f.pos;
  } catch (const StepLimit&) {
    r.outcome = ExecResult::Outcome::StepLimitExceeded;
  }
  return r;
}

void checkArity(const FunctionDecl& fn, const TestCase& test) {
  if (fn.params.size() != test.args.size()) {
    throw TestParseError("'" + fn.name + "' expects " + std::to_string(fn.params.size()) + " arguments, got " +
                         std::to_string(test.args.size()));
  }
}

}  // namespace

namespace {
TestCase parseTestImpl(std::string_view text, const SubjectProgram& program, const std::string& entry) {
  LiteralParser p(text);
  if (p.peek().kind != Token::Kind::Ident) p.fail("function name");
  TestCase test;
  test.entry = p.next().text;
  if (!entry.empty() && test.entry != entry) {
    throw TestParseError("test calls '" + test.entry + "' but the entry function is '" + entry + "'");
  }
  const FunctionDecl* fn = program.findFunction(test.entry);
  if (!fn) throw TestParseError("unknown function '" + test.entry + "'");
  p.expect("(");
  for (std::size_t i = 0; i < fn->params.size(); ++i) {
    if (i > 0) p.expect(",");
    test.args.push_back(p.literal(fn->params[i].type));
  }
  if (p.peek().isPunct(",")) {
    throw TestParseError("'" + fn->name + "' expects " + std::to_string(fn->params.size()) + " arguments");
  }
  p.expect(")");
  if (p.peek().isPunct(";")) p.next();
  if (p.peek().kind != Token::Kind::End) p.fail("end of test");
  return test;
}

}  // namespace

TestCase parseTestCase(std::string_view text, const SubjectProgram& program, const std::string& entry) {
  try {
    return parseTestImpl(text, program, entry);
  } catch (const SyntaxError& e) {
    throw TestParseError(e.what());
  }
}

std::string toString(ExecResult::Outcome o) {
  switch (o) {
    case ExecResult::Outcome::Returned: return "returned";
    case ExecResult::Outcome::AssertionViolated: return "assertion-violated";
    case ExecResult::Outcome::RuntimeError: return "runtime-error";
    case ExecResult::Outcome::StepLimitExceeded: return "step-limit-exceeded";
  }
  return "returned";
}

std::string ExecResult::describe() const {
  switch (outcome) {
    case Outcome::Returned: return "returned " + formatValue(returnValue);
    case Outcome::AssertionViolated: return "violated " + assertText + " (step " + std::to_string(stepIndex) + ")";
    case Outcome::RuntimeError: return errorKind + " at " + toString(errorPos);
    case Outcome::StepLimitExceeded: return "step limit exceeded";
  }
  return "";
}

ExecResult runProgram(const SubjectProgram& program, const TestCase& test, const ExecOptions& options) {
  const FunctionDecl* fn = program.findFunction(test.entry);
  if (!fn) throw TestParseError("unknown function '" + test.entry + "'");
  checkArity(*fn, test);
  return guarded([&](ExecResult& r) {
    Machine m(program, options, r, true);
    m.initFields();
    r.returnValue = m.callEntry(*fn, test.args);
  });
}

ExecResult runVariant(const PathVariant& variant, const SubjectProgram& program, const TestCase& test,
                      const ExecOptions& options) {
  if (test.entry != variant.entry) {
    throw TestParseError("test calls '" + test.entry + "' but the variant is of '" + variant.entry + "'");
  }
  if (test.args.size() != variant.params.size()) throw TestParseError("wrong number of arguments");
  return guarded([&](ExecResult& r) {
    Machine m(program, options, r, false);
    try {
      m.initFields();
      r.returnValue = m.runSteps(variant, test.args);
    } catch (const AssertFail& f) {
      const auto& a = *variant.steps[f.index].assertion();
      r.outcome = ExecResult::Outcome::AssertionViolated;
      r.stepIndex = f.index;
      r.assertText = assertText(a);
      r.expected = a.expected;
    }
  });
}

bool withinBounds(const ExecResult& r, const ExtractionConfig& cfg) {
  return r.stats.maxLoopIterations <= cfg.loopBound && r.stats.maxRecursionDepth <= cfg.recursionBound;
}

LocateResult locatePath(const SymTree& tree, const SubjectProgram& program, const TestCase& test,
                        const ExtractionConfig& cfg, const ExecOptions& options) {
  LocateResult out;
  ExecOptions opts = options;
  opts.inlinedCallSites = inlinedCallSites(program, cfg);
  out.exec = runProgram(program, test, opts);
  if (!out.exec.returned()) {
    out.diagnostic = "execution did not return: " + out.exec.describe();
    return out;
  }
  std::vector<TraceEvent> events;
  for (const auto& ev : out.exec.trace) {
    if (ev.inPathContext) events.push_back(ev);
  }

  std::optional<int> leaf;
  std::function<bool(int, std::size_t)> walk = [&](int id, std::size_t at) -> bool {
    const SymNode& n = tree.node(id);
    if (n.kind == NodeKind::Condition) {
      if (at >= events.size() || events[at].condNodeId != n.provenance) return false;
      for (int c : n.children) {
        if (tree.node(c).outcome == events[at].outcome && walk(c, at + 1)) return true;
      }
      return false;
    }
    if (n.pathId && at == events.size()) {
      leaf = id;
      return true;
    }
    for (int c : n.children) {
      if (walk(c, at)) return true;
    }
    return false;
  };
  if (!walk(tree.rootId(), 0)) {
    out.diagnostic = "execution leaves the enumerated paths";
    return out;
  }
  const SymNode& n = tree.node(*leaf);
  if (n.kind == NodeKind::Terminal && n.label != "end") {
    out.diagnostic = "execution reaches a " + n.label + " leaf";
    return out;
  }
  out.pathId = n.pathId;
  return out;
}

}  // namespace palm
