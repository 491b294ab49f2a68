#include "palm/printer.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace palm {

namespace {

constexpr int kPrecUnary = 7;
constexpr int kPrecPostfix = 8;
constexpr int kPrecPrimary = 9;

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 3;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 4;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 5;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 6;
  }
  return 0;
}

int precedence(const Expr& e) {
  if (const auto* b = e.as<Binary>()) return precedence(b->op);
  if (e.is<Unary>()) return kPrecUnary;
  if (const auto* i = e.as<IntLit>()) return i->value < 0 ? kPrecUnary : kPrecPrimary;
  if (const auto* d = e.as<DoubleLit>()) return std::signbit(d->value) ? kPrecUnary : kPrecPrimary;
  if (e.is<Call>() || e.is<MethodCall>() || e.is<Index>() || e.is<ArrayLen>()) return kPrecPostfix;
  return kPrecPrimary;
}

std::string typeName(SubjectType t) { return toString(t); }

std::string print(const Expr& e, int minPrec);

std::string args(const std::vector<ExprPtr>& list) {
  std::string out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i > 0) out += ", ";
    out += print(*list[i], 0);
  }
  return out;
}

std::string printBare(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, DoubleLit>) {
          return formatDouble(n.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return n.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, StringLit>) {
          return quoteString(n.value);
        } else if constexpr (std::is_same_v<T, CharLit>) {
          return quoteChar(n.value);
        } else if constexpr (std::is_same_v<T, VarRef>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, Unary>) {
          std::string inner = print(*n.operand, kPrecUnary);
          bool literal = n.operand->template is<IntLit>() || n.operand->template is<DoubleLit>();
          bool clash = n.op == UnaryOp::Neg && (literal || (!inner.empty() && inner[0] == '-'));
          if (clash && inner[0] != '(') inner = "(" + inner + ")";
          return std::string(spelling(n.op)) + inner;
        } else if constexpr (std::is_same_v<T, Binary>) {
          int p = precedence(n.op);
          return print(*n.lhs, p) + " " + std::string(spelling(n.op)) + " " + print(*n.rhs, p + 1);
        } else if constexpr (std::is_same_v<T, Call>) {
          return n.callee + "(" + args(n.args) + ")";
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          return print(*n.receiver, kPrecPostfix) + "." + n.method + "(" + args(n.args) + ")";
        } else if constexpr (std::is_same_v<T, Index>) {
          return print(*n.array, kPrecPostfix) + "[" + print(*n.index, 0) + "]";
        } else if constexpr (std::is_same_v<T, ArrayLen>) {
          return print(*n.array, kPrecPostfix) + ".length";
        } else {
          if (n.hasInitializer) return "new " + typeName(n.elementType) + "[]{" + args(n.elements) + "}";
          return "new " + typeName(n.elementType) + "[" + print(*n.size, 0) + "]";
        }
      },
      e.node);
}

std::string print(const Expr& e, int minPrec) {
  std::string s = printBare(e);
  return precedence(e) < minPrec ? "(" + s + ")" : s;
}

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

std::string simple(const Stmt& s);

/// Branch body after `if (...)`, `else`, `while (...)` or `do`.
std::string body(const Stmt& s, int indent) {
  if (s.is<BlockStmt>()) return " " + printStmt(s, indent);
  return "\n" + pad(indent + 1) + printStmt(s, indent + 1);
}

std::string simple(const Stmt& s) {
  if (const auto* d = s.as<DeclStmt>()) {
    std::string out = typeName(d->type) + " " + d->name;
    if (d->init) out += " = " + print(*d->init, 0);
    return out;
  }
  if (const auto* a = s.as<AssignStmt>()) return print(*a->target, 0) + " = " + print(*a->value, 0);
  if (const auto* x = s.as<ExprStmt>()) return print(*x->expr, 0);
  return printStmt(s);
}

}  // namespace

std::string formatDouble(double v) {
  if (std::isnan(v)) return "(0.0 / 0.0)";
  if (std::isinf(v)) return v > 0 ? "(1.0 / 0.0)" : "(-1.0 / 0.0)";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

namespace {

std::string escapeChar(char c, char quote) {
  switch (c) {
    case '\n': return "\\n";
    case '\t': return "\\t";
    case '\r': return "\\r";
    case '\0': return "\\0";
    case '\\': return "\\\\";
    default:
      if (c == quote) return std::string("\\") + quote;
      return std::string(1, c);
  }
}

}  // namespace

std::string quoteString(std::string_view value) {
  std::string out = "\"";
  for (char c : value) out += escapeChar(c, '"');
  return out + "\"";
}

std::string quoteChar(Char c) { return "'" + escapeChar(static_cast<char>(c.code), '\'') + "'"; }

std::string printExpr(const Expr& e) { return print(e, 0); }

std::string assertText(const AssertStmt& a) {
  return std::string(a.expected ? "assertTrue(" : "assertFalse(") + print(*a.cond, 0) + ")";
}

std::string printStmt(const Stmt& s, int indent) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DeclStmt> || std::is_same_v<T, AssignStmt> ||
                      std::is_same_v<T, ExprStmt>) {
          return simple(s) + ";";
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          std::string out = "if (" + print(*n.cond, 0) + ")" + body(*n.thenBranch, indent);
          if (n.elseBranch) {
            out += n.thenBranch->template is<BlockStmt>() ? " " : "\n" + pad(indent);
            if (n.elseBranch->template is<IfStmt>()) {
              out += "else " + printStmt(*n.elseBranch, indent);
            } else {
              out += "else" + body(*n.elseBranch, indent);
            }
          }
          return out;
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          return "while (" + print(*n.cond, 0) + ")" + body(*n.body, indent);
        } else if constexpr (std::is_same_v<T, DoWhileStmt>) {
          std::string out = "do" + body(*n.body, indent);
          out += n.body->template is<BlockStmt>() ? " " : "\n" + pad(indent);
          return out + "while (" + print(*n.cond, 0) + ");";
        } else if constexpr (std::is_same_v<T, ForStmt>) {
          std::string out = "for (";
          if (n.init) out += simple(*n.init);
          out += "; " + print(*n.cond, 0) + ";";
          if (n.update) out += " " + simple(*n.update);
          return out + ")" + body(*n.body, indent);
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          return n.value ? "return " + print(*n.value, 0) + ";" : std::string("return;");
        } else if constexpr (std::is_same_v<T, BlockStmt>) {
          if (n.stmts.empty()) return "{ }";
          std::string out = "{\n";
          for (const auto& st : n.stmts) out += pad(indent + 1) + printStmt(*st, indent + 1) + "\n";
          return out + pad(indent) + "}";
        } else {
          return assertText(n) + ";";
        }
      },
      s.node);
}

std::string printField(const FieldDecl& field) {
  std::string out = typeName(field.type) + " " + field.name;
  if (field.init) out += " = " + print(*field.init, 0);
  return out + ";";
}

std::string printFunction(const FunctionDecl& fn) {
  std::string out = typeName(fn.returnType) + " " + fn.name + "(";
  for (std::size_t i = 0; i < fn.params.size(); ++i) {
    if (i > 0) out += ", ";
    out += typeName(fn.params[i].type) + " " + fn.params[i].name;
  }
  return out + ") " + printStmt(*fn.body, 0);
}

std::string prettyPrint(const SubjectProgram& program) {
  // Fields and functions may interleave in source; node ids follow source
  // order, so emit declarations ordered by their first node id.
  struct Item {
    NodeId first;
    std::string text;
    bool isField;
  };
  std::vector<Item> items;
  for (const auto& f : program.fields) {
    NodeId first = f.id;
    if (f.init) forEachSubExpr(*f.init, [&](const Expr& e) { first = std::min(first, e.id); });
    items.push_back({first, printField(f), true});
  }
  for (const auto& fn : program.functions) items.push_back({fn.firstNode, printFunction(fn), false});
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return a.first < b.first; });
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += items[i].isField && items[i - 1].isField ? "\n" : "\n\n";
    out += items[i].text;
  }
  return out + "\n";
}

std::string compactText(std::string_view text) {
  std::string out;
  char quote = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quote) {
      out += c;
      if (c == '\\' && i + 1 < text.size()) {
        out += text[++i];
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '"' || c == '\'') quote = c;
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    out += c;
  }
  return out;
}

}  // namespace palm
