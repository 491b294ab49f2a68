#include "palm/ast.hpp"

#include <cmath>
#include <cstring>

#include "palm/errors.hpp"

namespace palm {

std::string toString(SourcePos pos) {
  return std::to_string(pos.line) + ":" + std::to_string(pos.column);
}

std::string toString(SubjectType type) {
  std::string base;
  switch (type.kind) {
    case SubjectType::Kind::Int: base = "int"; break;
    case SubjectType::Kind::Double: base = "double"; break;
    case SubjectType::Kind::Boolean: base = "boolean"; break;
    case SubjectType::Kind::Char: base = "char"; break;
    case SubjectType::Kind::String: base = "String"; break;
    case SubjectType::Kind::Void: base = "void"; break;
  }
  return type.isArray ? base + "[]" : base;
}

std::string_view spelling(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "!"; }

std::string_view spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

SyntaxError::SyntaxError(SourcePos pos, std::vector<std::string> expected, std::string found)
    : PalmError([&] {
        std::string msg = "syntax error at " + toString(pos) + ": expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
          if (i > 0) msg += i + 1 == expected.size() ? " or " : ", ";
          msg += expected[i];
        }
        return msg + " but found " + found;
      }()),
      pos_(pos),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

ResolveError::ResolveError(std::string name, SourcePos pos, std::string detail)
    : PalmError("resolve error at " + toString(pos) + ": " + detail + " '" + name + "'"),
      name_(std::move(name)),
      pos_(pos) {}

TypeError::TypeError(SourcePos pos, std::string found, std::string expected)
    : PalmError("type error at " + toString(pos) + ": found " + found + ", expected " + expected),
      pos_(pos),
      found_(std::move(found)),
      expected_(std::move(expected)) {}

const FunctionDecl* SubjectProgram::findFunction(std::string_view name) const {
  for (const auto& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const FieldDecl* SubjectProgram::findField(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

SubjectType SubjectProgram::typeOf(const Expr& e) const {
  auto it = exprTypes.find(e.id);
  if (it == exprTypes.end()) throw PalmError("no type recorded for expression node " + std::to_string(e.id));
  return it->second;
}

ExprPtr makeExpr(Expr::Node node, NodeId id, SourcePos pos) {
  return std::make_shared<const Expr>(Expr{id, pos, std::move(node)});
}

StmtPtr makeStmt(Stmt::Node node, NodeId id, SourcePos pos) {
  return std::make_shared<const Stmt>(Stmt{id, pos, std::move(node)});
}

namespace {

bool eqPtr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return structurallyEqual(*a, *b);
}

bool eqPtr(const StmtPtr& a, const StmtPtr& b) {
  if (!a || !b) return !a && !b;
  return structurallyEqual(*a, *b);
}

bool eqList(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!eqPtr(a[i], b[i])) return false;
  }
  return true;
}

struct ExprEq {
  const Expr::Node& other;

  bool operator()(const IntLit& x) const { return std::get<IntLit>(other).value == x.value; }
  bool operator()(const DoubleLit& x) const {
    // Bitwise so that NaN and signed zero compare consistently.
    double y = std::get<DoubleLit>(other).value;
    return std::memcmp(&x.value, &y, sizeof(double)) == 0;
  }
  bool operator()(const BoolLit& x) const { return std::get<BoolLit>(other).value == x.value; }
  bool operator()(const StringLit& x) const { return std::get<StringLit>(other).value == x.value; }
  bool operator()(const CharLit& x) const { return std::get<CharLit>(other).value == x.value; }
  bool operator()(const VarRef& x) const { return std::get<VarRef>(other).name == x.name; }
  bool operator()(const Unary& x) const {
    const auto& y = std::get<Unary>(other);
    return x.op == y.op && eqPtr(x.operand, y.operand);
  }
  bool operator()(const Binary& x) const {
    const auto& y = std::get<Binary>(other);
    return x.op == y.op && eqPtr(x.lhs, y.lhs) && eqPtr(x.rhs, y.rhs);
  }
  bool operator()(const Call& x) const {
    const auto& y = std::get<Call>(other);
    return x.callee == y.callee && eqList(x.args, y.args);
  }
  bool operator()(const MethodCall& x) const {
    const auto& y = std::get<MethodCall>(other);
    return x.method == y.method && eqPtr(x.receiver, y.receiver) && eqList(x.args, y.args);
  }
  bool operator()(const Index& x) const {
    const auto& y = std::get<Index>(other);
    return eqPtr(x.array, y.array) && eqPtr(x.index, y.index);
  }
  bool operator()(const ArrayLen& x) const { return eqPtr(x.array, std::get<ArrayLen>(other).array); }
  bool operator()(const NewArray& x) const {
    const auto& y = std::get<NewArray>(other);
    return x.elementType == y.elementType && x.hasInitializer == y.hasInitializer &&
           eqPtr(x.size, y.size) && eqList(x.elements, y.elements);
  }
};

struct StmtEq {
  const Stmt::Node& other;

  bool operator()(const DeclStmt& x) const {
    const auto& y = std::get<DeclStmt>(other);
    return x.type == y.type && x.name == y.name && eqPtr(x.init, y.init);
  }
  bool operator()(const AssignStmt& x) const {
    const auto& y = std::get<AssignStmt>(other);
    return eqPtr(x.target, y.target) && eqPtr(x.value, y.value);
  }
  bool operator()(const IfStmt& x) const {
    const auto& y = std::get<IfStmt>(other);
    return eqPtr(x.cond, y.cond) && eqPtr(x.thenBranch, y.thenBranch) &&
           eqPtr(x.elseBranch, y.elseBranch);
  }
  bool operator()(const WhileStmt& x) const {
    const auto& y = std::get<WhileStmt>(other);
    return eqPtr(x.cond, y.cond) && eqPtr(x.body, y.body);
  }
  bool operator()(const DoWhileStmt& x) const {
    const auto& y = std::get<DoWhileStmt>(other);
    return eqPtr(x.cond, y.cond) && eqPtr(x.body, y.body);
  }
  bool operator()(const ForStmt& x) const {
    const auto& y = std::get<ForStmt>(other);
    return eqPtr(x.init, y.init) && eqPtr(x.cond, y.cond) && eqPtr(x.update, y.update) &&
           eqPtr(x.body, y.body);
  }
  bool operator()(const ReturnStmt& x) const { return eqPtr(x.value, std::get<ReturnStmt>(other).value); }
  bool operator()(const BlockStmt& x) const {
    const auto& y = std::get<BlockStmt>(other);
    if (x.stmts.size() != y.stmts.size()) return false;
    for (std::size_t i = 0; i < x.stmts.size(); ++i) {
      if (!eqPtr(x.stmts[i], y.stmts[i])) return false;
    }
    return true;
  }
  bool operator()(const ExprStmt& x) const { return eqPtr(x.expr, std::get<ExprStmt>(other).expr); }
  bool operator()(const AssertStmt& x) const {
    const auto& y = std::get<AssertStmt>(other);
    return x.expected == y.expected && eqPtr(x.cond, y.cond);
  }
};

}  // namespace

bool structurallyEqual(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(ExprEq{b.node}, a.node);
}

bool structurallyEqual(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(StmtEq{b.node}, a.node);
}

bool structurallyEqual(const SubjectProgram& a, const SubjectProgram& b) {
  if (a.fields.size() != b.fields.size() || a.functions.size() != b.functions.size()) return false;
  for (std::size_t i = 0; i < a.fields.size(); ++i) {
    const auto& x = a.fields[i];
    const auto& y = b.fields[i];
    if (x.name != y.name || x.type != y.type || !eqPtr(x.init, y.init)) return false;
  }
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& x = a.functions[i];
    const auto& y = b.functions[i];
    if (x.name != y.name || x.params != y.params || x.returnType != y.returnType ||
        !eqPtr(x.body, y.body)) {
      return false;
    }
  }
  return true;
}

void forEachSubExpr(const Expr& e, const std::function<void(const Expr&)>& fn) {
  auto sub = [&](const ExprPtr& p) {
    if (p) forEachSubExpr(*p, fn);
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Unary>) {
          sub(n.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          sub(n.lhs);
          sub(n.rhs);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& a : n.args) sub(a);
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          sub(n.receiver);
          for (const auto& a : n.args) sub(a);
        } else if constexpr (std::is_same_v<T, Index>) {
          sub(n.array);
          sub(n.index);
        } else if constexpr (std::is_same_v<T, ArrayLen>) {
          sub(n.array);
        } else if constexpr (std::is_same_v<T, NewArray>) {
          sub(n.size);
          for (const auto& a : n.elements) sub(a);
        }
      },
      e.node);
  fn(e);
}

}  // namespace palm
