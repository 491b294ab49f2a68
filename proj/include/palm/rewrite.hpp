#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "palm/ast.hpp"

namespace palm {

/// Returns a replacement for `e`, or null to descend into its children.
using ExprRewriter = std::function<ExprPtr(const ExprPtr& e)>;

/// Rebuilds `e` bottom-up, keeping node ids and sharing unchanged subtrees.
ExprPtr rewriteExpr(const ExprPtr& e, const ExprRewriter& fn);

/// Applies `fn` to every expression directly owned by a straight-line
/// statement (Decl, Assign, ExprStmt, Return, Assert). Other statements are
/// returned unchanged.
StmtPtr rewriteStmtExprs(const StmtPtr& s, const ExprRewriter& fn);

/// Renames variable references and declarations of a straight-line statement.
StmtPtr renameInStmt(const StmtPtr& s, const std::map<std::string, std::string>& names);

/// Expressions directly owned by `s`, in evaluation order. Nested statements
/// are not visited.
std::vector<ExprPtr> directExprs(const Stmt& s);

/// Visits every statement of `s` (pre-order), including nested ones.
void forEachStmt(const Stmt& s, const std::function<void(const Stmt&)>& fn);

/// Visits calls of program functions that are evaluated whenever the
/// enclosing expression is, i.e. not inside the right operand of && or ||.
/// Calls are visited in evaluation order.
void forEachUnconditionalCall(const Expr& e, const std::function<void(const Expr&)>& fn);

/// True if `needle` is `hay` or one of its subexpressions (pointer identity).
bool containsExpr(const Expr& hay, const Expr* needle);

}  // namespace palm
