#pragma once

#include <string>
#include <string_view>

#include "palm/ast.hpp"

namespace palm {

/// Renders a program so that re-parsing yields a structurally equal program
/// with the same node ids.
std::string prettyPrint(const SubjectProgram& program);

std::string printExpr(const Expr& e);
std::string printField(const FieldDecl& field);
std::string printFunction(const FunctionDecl& fn);

/// Multi-line statement rendering; nested lines are indented two spaces per level.
std::string printStmt(const Stmt& s, int indent = 0);

/// `assertTrue(x > 0)` without the trailing semicolon.
std::string assertText(const AssertStmt& a);

std::string quoteString(std::string_view value);
std::string quoteChar(Char c);
std::string formatDouble(double v);

/// Drops whitespace outside string and char literals, so that
/// "assertTrue(y + z > 0)" and "assertTrue(y+z>0)" compare equal.
std::string compactText(std::string_view text);

}  // namespace palm
