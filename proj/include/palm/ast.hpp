#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace palm {

using NodeId = std::uint32_t;

/// Id carried by nodes synthesized by transformations rather than parsing.
inline constexpr NodeId kSyntheticNode = 0;

struct SourcePos {
  int line = 0;
  int column = 0;

  auto operator<=>(const SourcePos&) const = default;
};

std::string toString(SourcePos pos);

/// A single-byte character value. Characters order by code point.
struct Char {
  std::uint8_t code = 0;

  auto operator<=>(const Char&) const = default;
};

struct SubjectType {
  enum class Kind { Int, Double, Boolean, Char, String, Void };

  Kind kind = Kind::Void;
  bool isArray = false;

  static SubjectType scalar(Kind k) { return {k, false}; }
  static SubjectType arrayOf(Kind k) { return {k, true}; }

  SubjectType element() const { return {kind, false}; }
  bool isVoid() const { return kind == Kind::Void; }
  bool isNumeric() const {
    return !isArray && (kind == Kind::Int || kind == Kind::Double || kind == Kind::Char);
  }

  bool operator==(const SubjectType&) const = default;
};

std::string toString(SubjectType type);

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

std::string_view spelling(UnaryOp op);
std::string_view spelling(BinaryOp op);

struct Expr;
struct Stmt;
using ExprPtr = std::shared_ptr<const Expr>;
using StmtPtr = std::shared_ptr<const Stmt>;

struct IntLit {
  std::int64_t value = 0;
};
struct DoubleLit {
  double value = 0.0;
};
struct BoolLit {
  bool value = false;
};
struct StringLit {
  std::string value;
};
struct CharLit {
  Char value;
};
struct VarRef {
  std::string name;
};
struct Unary {
  UnaryOp op;
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
/// Call of a program-defined function or a free builtin (abs/min/max/floor).
struct Call {
  std::string callee;
  std::vector<ExprPtr> args;
};
/// Builtin method on a string receiver, e.g. `s.charAt(i)`.
struct MethodCall {
  ExprPtr receiver;
  std::string method;
  std::vector<ExprPtr> args;
};
struct Index {
  ExprPtr array;
  ExprPtr index;
};
struct ArrayLen {
  ExprPtr array;
};
/// `new T[size]` or `new T[]{e1, e2}`; exactly one of size/elements is used.
struct NewArray {
  SubjectType elementType;
  ExprPtr size;
  std::vector<ExprPtr> elements;
  bool hasInitializer = false;
};

struct Expr {
  using Node = std::variant<IntLit, DoubleLit, BoolLit, StringLit, CharLit, VarRef, Unary, Binary,
                            Call, MethodCall, Index, ArrayLen, NewArray>;

  NodeId id = kSyntheticNode;
  SourcePos pos;
  Node node;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

struct DeclStmt {
  SubjectType type;
  std::string name;
  ExprPtr init;  // may be null
};
/// Target is a VarRef or an Index expression.
struct AssignStmt {
  ExprPtr target;
  ExprPtr value;
};
struct IfStmt {
  ExprPtr cond;
  StmtPtr thenBranch;
  StmtPtr elseBranch;  // may be null
};
struct WhileStmt {
  ExprPtr cond;
  StmtPtr body;
};
struct DoWhileStmt {
  StmtPtr body;
  ExprPtr cond;
};
/// A missing condition is parsed as the literal `true`.
struct ForStmt {
  StmtPtr init;    // Decl, Assign or ExprStmt; may be null
  ExprPtr cond;
  StmtPtr update;  // Assign or ExprStmt; may be null
  StmtPtr body;
};
struct ReturnStmt {
  ExprPtr value;  // may be null
};
struct BlockStmt {
  std::vector<StmtPtr> stmts;
};
struct ExprStmt {
  ExprPtr expr;
};
/// Branch-outcome assertion. Only produced by path extraction.
struct AssertStmt {
  ExprPtr cond;
  bool expected = true;
};

struct Stmt {
  using Node = std::variant<DeclStmt, AssignStmt, IfStmt, WhileStmt, DoWhileStmt, ForStmt,
                            ReturnStmt, BlockStmt, ExprStmt, AssertStmt>;

  NodeId id = kSyntheticNode;
  SourcePos pos;
  Node node;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

struct Param {
  std::string name;
  SubjectType type;

  bool operator==(const Param&) const = default;
};

struct FieldDecl {
  NodeId id = kSyntheticNode;
  SourcePos pos;
  SubjectType type;
  std::string name;
  ExprPtr init;  // may be null
};

struct FunctionDecl {
  NodeId id = kSyntheticNode;
  SourcePos pos;
  std::string name;
  std::vector<Param> params;
  SubjectType returnType;
  StmtPtr body;  // always a BlockStmt
  NodeId firstNode = kSyntheticNode;
  NodeId lastNode = kSyntheticNode;
};

struct SubjectProgram {
  std::vector<FieldDecl> fields;
  std::vector<FunctionDecl> functions;
  std::string sourceText;
  /// Static type of every parsed expression, filled by the resolve pass.
  std::map<NodeId, SubjectType> exprTypes;

  const FunctionDecl* findFunction(std::string_view name) const;
  const FieldDecl* findField(std::string_view name) const;
  SubjectType typeOf(const Expr& e) const;
};

// Node construction helpers used by transformations.
ExprPtr makeExpr(Expr::Node node, NodeId id = kSyntheticNode, SourcePos pos = {});
StmtPtr makeStmt(Stmt::Node node, NodeId id = kSyntheticNode, SourcePos pos = {});

/// Structural equality ignoring node ids and source positions.
bool structurallyEqual(const Expr& a, const Expr& b);
bool structurallyEqual(const Stmt& a, const Stmt& b);
bool structurallyEqual(const SubjectProgram& a, const SubjectProgram& b);

/// Visits every expression of `e` in evaluation order (children before parents).
void forEachSubExpr(const Expr& e, const std::function<void(const Expr&)>& fn);

}  // namespace palm
